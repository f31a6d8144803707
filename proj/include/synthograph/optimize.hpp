#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace synthograph {

struct OptimizerConfig {
  int max_iterations = 200;
  /// Stop once |f_prev - f| / |f_prev| falls below this.
  double relative_tolerance = 1e-6;
  double sufficient_decrease = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 60;
};

struct OptimizationResult {
  Eigen::VectorXd x;
  /// Objective at the start point, then after every accepted step.
  std::vector<double> trace;
  int iterations = 0;
  std::string stop_reason;
};

/// Returns f(x) and writes the gradient into `grad` (already sized).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Deterministic full-batch gradient descent. Trial steps use the
/// Barzilai-Borwein length and are backtracked until the Armijo condition
/// holds, so accepted objectives never increase.
OptimizationResult minimize(const Objective& f, Eigen::VectorXd x0, const OptimizerConfig& config);

}  // namespace synthograph
