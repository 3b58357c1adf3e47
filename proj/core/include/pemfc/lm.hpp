#pragma once

#include <Eigen/Dense>
#include <functional>

namespace pemfc {

struct LmOptions {
  double damping_init = 1e-3;
  double damping_up = 10.0;        // multiplier on a rejected step
  double damping_down = 10.0;      // divisor on an accepted step
  double tol_rel_decrease = 1e-12;
  double tol_grad_inf = 1e-12;
  double tol_step = 1e-12;         // relative step size counted as negligible
  double max_step = 20.0;          // per-iteration cap on |delta|_inf
  int max_iterations = 200;
};

struct LmResult {
  Eigen::VectorXd x;
  double sse = 0.0;
  int n_iterations = 0;
  bool converged = false;
};

// Callback fills the residual vector r(x) and Jacobian J(x) = dr/dx.
using LmModel = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)>;

// Levenberg-Marquardt with multiplicative damping on the normal equations
// (JtJ + damping * diag(JtJ)) delta = -Jt r. Stops on a relative objective
// decrease or gradient infinity-norm below tolerance, or on max_iterations.
LmResult lm_minimize(const Eigen::VectorXd& x0, const LmModel& model, const LmOptions& opts = {});

}  // namespace pemfc
