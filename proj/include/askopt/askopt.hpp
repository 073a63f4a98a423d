// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "askopt/errors.hpp"
#include "askopt/rng.hpp"
#include "askopt/sparse_grid.hpp"
#include "askopt/spectral_basis.hpp"
#include "askopt/koopman.hpp"
#include "askopt/problems.hpp"
#include "askopt/ask_optimizer.hpp"
#include "askopt/baselines.hpp"
#include "askopt/bench.hpp"
