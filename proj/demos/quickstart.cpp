// Minimizes the six-hump camel function with ASK and gradient descent from
// the same starting point.

#include <iostream>

#include "askopt/askopt.hpp"

int main() {
  const askopt::Problem camel = askopt::camel6();
  const Eigen::Vector2d x0(1.2, -0.4);

  askopt::AskConfig ask;
  const askopt::AskResult a = askopt::ask_optimize(camel, x0, ask);
  std::cout << "ask: " << askopt::to_string(a.status) << " after " << a.outer_iters << " steps, x = ("
            << a.x_final.transpose() << "), |grad| = " << a.grad_norm << ", f = " << camel.value(a.x_final) << '\n';

  askopt::BaselineConfig gd;
  gd.method = askopt::BaselineMethod::GD;
  const askopt::BaselineResult g = askopt::run_baseline(camel, x0, gd);
  std::cout << "gd:  " << askopt::to_string(g.status) << " after " << g.iterations << " steps, x = ("
            << g.x_final.transpose() << "), |grad| = " << g.grad_norm << '\n';
}
