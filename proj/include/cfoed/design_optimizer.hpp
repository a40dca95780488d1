#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cfoed/parallel.hpp"

namespace cfoed {

using CriterionFn = std::function<double(const Eigen::VectorXd&)>;
using CriterionWithGradFn =
    std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>;

/// Exhaustive tensor-grid evaluation. Failed evaluations are skipped with a
/// warning and recorded; the argmax set collects every point within 1e-10
/// of the maximum, so plateaus show up whole.
struct SweepResult {
  Eigen::MatrixXd points;   // R x C
  Eigen::VectorXd values;   // R, NaN where evaluation failed
  std::vector<int> argmax_indices;
  std::vector<int> failed_indices;
  double max_value = 0.0;
};

SweepResult grid_sweep(const CriterionFn& evaluator,
                       const std::vector<std::array<double, 2>>& bounds,
                       int resolution_per_dim, const ExecPolicy& policy = {});

struct AscentOptions {
  int max_iterations = 200;
  double projected_grad_tolerance = 1e-8;
  int max_backtracks = 40;
  int multistarts = 8;
};

struct IterateRecord {
  Eigen::VectorXd beta;
  double value = 0.0;
  double grad_norm = 0.0;
};

struct OptimizationReport {
  Eigen::VectorXd best_beta;
  double best_value = 0.0;
  std::vector<IterateRecord> trace;  // accepted iterates, value non-decreasing
  std::string termination;
  bool used_degenerate_fallback = false;
};

/// Projected gradient ascent with backtracking line search on a box. A
/// degenerate-eigenvalue failure at an iterate falls back to shrinking
/// local sweeps around the iterate (using value_only when provided) and
/// reports that it did.
OptimizationReport projected_gradient_ascent(
    const CriterionWithGradFn& evaluator, const Eigen::VectorXd& beta0,
    const std::vector<std::array<double, 2>>& bounds,
    const AscentOptions& options = {}, const CriterionFn& value_only = {});

/// Best of options.multistarts independent ascents from deterministic
/// low-discrepancy starts; the winner is selected by value with a
/// lexicographic tie-break, so the result does not depend on start order.
OptimizationReport multistart_ascent(
    const CriterionWithGradFn& evaluator,
    const std::vector<std::array<double, 2>>& bounds,
    const AscentOptions& options = {}, const ExecPolicy& policy = {},
    const CriterionFn& value_only = {});

}  // namespace cfoed
