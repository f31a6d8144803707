#include "synthograph/optimize.hpp"

#include <cmath>
#include <limits>

namespace synthograph {

OptimizationResult minimize(const Objective& f, Eigen::VectorXd x0, const OptimizerConfig& config) {
  OptimizationResult result;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd grad(x.size());
  double fx = f(x, grad);
  result.trace.push_back(fx);

  Eigen::VectorXd trial(x.size());
  Eigen::VectorXd trial_grad(x.size());
  double step = config.initial_step;
  result.stop_reason = "max_iterations";

  for (int it = 0; it < config.max_iterations; ++it) {
    const double gnorm2 = grad.squaredNorm();
    if (gnorm2 == 0.0) {
      result.stop_reason = "zero_gradient";
      break;
    }
    double alpha = step;
    double ftrial = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      trial = x - alpha * grad;
      ftrial = f(trial, trial_grad);
      if (std::isfinite(ftrial) && ftrial <= fx - config.sufficient_decrease * alpha * gnorm2) {
        accepted = true;
        break;
      }
      alpha *= config.backtrack_factor;
    }
    if (!accepted) {
      result.stop_reason = "line_search_failed";
      break;
    }

    const Eigen::VectorXd s = trial - x;
    const Eigen::VectorXd y = trial_grad - grad;
    const double sy = s.dot(y);
    step = sy > 0 ? s.squaredNorm() / sy : 2.0 * alpha;

    const double fprev = fx;
    x.swap(trial);
    grad.swap(trial_grad);
    fx = ftrial;
    result.trace.push_back(fx);
    result.iterations = it + 1;

    const double denom = std::max(std::abs(fprev), std::numeric_limits<double>::min());
    if (std::abs(fprev - fx) / denom < config.relative_tolerance) {
      result.stop_reason = "converged";
      break;
    }
  }
  result.x = std::move(x);
  return result;
}

}  // namespace synthograph
