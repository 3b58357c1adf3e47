#include "pemfc/lm.hpp"

#include <algorithm>
#include <cmath>

namespace pemfc {

LmResult lm_minimize(const Eigen::VectorXd& x0, const LmModel& model, const LmOptions& opts) {
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  model(x, r, J);
  double sse = r.squaredNorm();
  double damping = opts.damping_init;

  LmResult out;
  out.converged = false;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const Eigen::VectorXd g = J.transpose() * r;  // gradient of SSE/2
    if (g.lpNorm<Eigen::Infinity>() < opts.tol_grad_inf) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = J.transpose() * J;

    bool accepted = false;
    bool at_minimum = false;
    while (damping < 1e16) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += damping * jtj.diagonal();
      const Eigen::VectorXd delta = a.ldlt().solve(-g);
      if (!delta.allFinite()) {
        damping *= opts.damping_up;
        continue;
      }
      // Over-long steps count as rejections: vanishing Jacobian columns make
      // the normal equations fling weakly-observed components arbitrarily far,
      // so the damping must rise until the step is trust-region sized.
      if (delta.lpNorm<Eigen::Infinity>() > opts.max_step) {
        damping *= opts.damping_up;
        continue;
      }
      const Eigen::VectorXd x_try = x + delta;
      Eigen::VectorXd r_try;
      Eigen::MatrixXd j_try;
      model(x_try, r_try, j_try);
      const double sse_try = r_try.squaredNorm();
      if (sse_try <= sse && std::isfinite(sse_try)) {
        const bool tiny_decrease =
            (sse - sse_try) <= opts.tol_rel_decrease * std::max(sse, 1e-300);
        const bool tiny_step =
            delta.lpNorm<Eigen::Infinity>() <=
            opts.tol_step * (1.0 + x.lpNorm<Eigen::Infinity>());
        // A negligible decrease only means convergence when the step was a
        // (near) Gauss-Newton one; heavily damped steps are short by
        // construction, so let the damping relax and keep going.
        at_minimum = tiny_decrease && (tiny_step || damping <= opts.damping_init);
        x = x_try;
        r = std::move(r_try);
        J = std::move(j_try);
        sse = sse_try;
        damping = std::max(damping / opts.damping_down, 1e-15);
        accepted = true;
        break;
      }
      damping *= opts.damping_up;
    }
    if (!accepted) break;  // damping exhausted without descent: stuck
    if (at_minimum) {
      out.converged = true;
      ++iter;
      break;
    }
  }

  out.x = std::move(x);
  out.sse = sse;
  out.n_iterations = iter;
  return out;
}

}  // namespace pemfc
