#include "cfoed/design_optimizer.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "cfoed/errors.hpp"

namespace cfoed {

namespace {

constexpr double kArgmaxWindow = 1e-10;

Eigen::VectorXd clamp_to(const std::vector<std::array<double, 2>>& box,
                         Eigen::VectorXd x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto& b = box[static_cast<std::size_t>(i)];
    x[i] = std::min(std::max(x[i], b[0]), b[1]);
  }
  return x;
}

Eigen::VectorXd projected_ascent_direction(
    const std::vector<std::array<double, 2>>& box, const Eigen::VectorXd& x,
    const Eigen::VectorXd& g) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto& b = box[static_cast<std::size_t>(i)];
    if (x[i] <= b[0] && g[i] < 0.0) pg[i] = 0.0;
    if (x[i] >= b[1] && g[i] > 0.0) pg[i] = 0.0;
  }
  return pg;
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace

SweepResult grid_sweep(const CriterionFn& evaluator,
                       const std::vector<std::array<double, 2>>& bounds,
                       int resolution_per_dim, const ExecPolicy& policy) {
  const int dims = static_cast<int>(bounds.size());
  if (dims < 1) throw config_error("sweep needs at least one control");
  if (resolution_per_dim < 2)
    throw config_error("sweep resolution must be at least 2 per dimension");
  for (const auto& b : bounds) {
    if (!(b[0] <= b[1])) throw config_error("sweep bounds must satisfy lo <= hi");
  }
  double total_d = 1.0;
  for (int d = 0; d < dims; ++d) total_d *= resolution_per_dim;
  if (total_d > 1e6) throw config_error("sweep grid exceeds 1e6 points");
  const int total = static_cast<int>(total_d);

  SweepResult result;
  result.points.resize(total, dims);
  result.values.resize(total);
  for (int r = 0; r < total; ++r) {
    int rest = r;
    for (int d = dims - 1; d >= 0; --d) {
      const int idx = rest % resolution_per_dim;
      rest /= resolution_per_dim;
      const auto& b = bounds[static_cast<std::size_t>(d)];
      result.points(r, d) =
          b[0] + (b[1] - b[0]) * idx / (resolution_per_dim - 1);
    }
  }

  std::vector<char> failed(static_cast<std::size_t>(total), 0);
  std::vector<std::string> failure_notes(static_cast<std::size_t>(total));
  parallel_for(total, policy, [&](int r) {
    try {
      result.values[r] = evaluator(result.points.row(r).transpose());
    } catch (const std::exception& e) {
      result.values[r] = std::numeric_limits<double>::quiet_NaN();
      failed[static_cast<std::size_t>(r)] = 1;
      failure_notes[static_cast<std::size_t>(r)] = e.what();
    }
  });

  result.max_value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < total; ++r) {
    if (failed[static_cast<std::size_t>(r)]) {
      result.failed_indices.push_back(r);
      std::cerr << "warning: sweep point " << r << " skipped: "
                << failure_notes[static_cast<std::size_t>(r)] << '\n';
      continue;
    }
    result.max_value = std::max(result.max_value, result.values[r]);
  }
  if (result.failed_indices.size() == static_cast<std::size_t>(total))
    throw optimization_error("every sweep point failed to evaluate");
  for (int r = 0; r < total; ++r) {
    if (!failed[static_cast<std::size_t>(r)] &&
        result.values[r] >= result.max_value - kArgmaxWindow)
      result.argmax_indices.push_back(r);
  }
  return result;
}

OptimizationReport projected_gradient_ascent(
    const CriterionWithGradFn& evaluator, const Eigen::VectorXd& beta0,
    const std::vector<std::array<double, 2>>& bounds,
    const AscentOptions& options, const CriterionFn& value_only) {
  if (bounds.size() != static_cast<std::size_t>(beta0.size()))
    throw contract_error("bounds must match the number of controls");

  OptimizationReport report;
  Eigen::VectorXd beta = clamp_to(bounds, beta0);

  // neighborhood sweeps around the iterate, used when the eigenvalue
  // gradient is undefined there
  auto degenerate_fallback = [&](double current_value) {
    report.used_degenerate_fallback = true;
    Eigen::VectorXd best = beta;
    double best_value = current_value;
    double radius = 0.0;
    for (const auto& b : bounds) radius = std::max(radius, 0.25 * (b[1] - b[0]));
    for (int round = 0; round < 3; ++round, radius *= 0.5) {
      std::vector<std::array<double, 2>> local(bounds.size());
      for (std::size_t d = 0; d < bounds.size(); ++d) {
        local[d] = {std::max(bounds[d][0], best[static_cast<Eigen::Index>(d)] - radius),
                    std::min(bounds[d][1], best[static_cast<Eigen::Index>(d)] + radius)};
      }
      const CriterionFn fn = value_only
                                 ? value_only
                                 : CriterionFn([&](const Eigen::VectorXd& x) {
                                     return evaluator(x).first;
                                   });
      const SweepResult sweep = grid_sweep(fn, local, 9, ExecPolicy::serial());
      for (int idx : sweep.argmax_indices) {
        if (sweep.values[idx] > best_value) {
          best_value = sweep.values[idx];
          best = sweep.points.row(idx).transpose();
        }
      }
    }
    beta = best;
    return best_value;
  };

  double value;
  Eigen::VectorXd grad;
  try {
    std::tie(value, grad) = evaluator(beta);
  } catch (const degenerate_eigenvalue_error&) {
    const double v0 = value_only ? value_only(beta)
                                 : -std::numeric_limits<double>::infinity();
    value = degenerate_fallback(v0);
    report.best_beta = beta;
    report.best_value = value;
    report.trace.push_back({beta, value, std::numeric_limits<double>::quiet_NaN()});
    report.termination = "degenerate_fallback";
    return report;
  }

  Eigen::VectorXd pg = projected_ascent_direction(bounds, beta, grad);
  report.trace.push_back({beta, value, pg.norm()});
  report.termination = "max_iterations";

  // fixed base step scaled to the box so the first trial crosses it
  double box_span = 0.0;
  for (const auto& b : bounds) box_span = std::max(box_span, b[1] - b[0]);

  for (int it = 0; it < options.max_iterations; ++it) {
    if (pg.norm() < options.projected_grad_tolerance) {
      report.termination = "converged";
      break;
    }
    const double base = box_span / std::max(pg.norm(), 1e-12);
    double t = base;
    bool accepted = false;
    for (int backtrack = 0; backtrack < options.max_backtracks; ++backtrack) {
      const Eigen::VectorXd trial = clamp_to(bounds, beta + t * grad);
      const Eigen::VectorXd movement = trial - beta;
      if (movement.norm() == 0.0) break;
      const double slope = grad.dot(movement);
      double trial_value;
      Eigen::VectorXd trial_grad;
      try {
        std::tie(trial_value, trial_grad) = evaluator(trial);
      } catch (const degenerate_eigenvalue_error&) {
        const double fallback_value = degenerate_fallback(value);
        report.trace.push_back(
            {beta, fallback_value, std::numeric_limits<double>::quiet_NaN()});
        report.best_beta = beta;
        report.best_value = std::max(value, fallback_value);
        report.termination = "degenerate_fallback";
        return report;
      } catch (const error&) {
        t *= 0.5;
        continue;
      }
      if (trial_value >= value + 1e-4 * std::max(slope, 0.0) &&
          trial_value > value) {
        beta = trial;
        value = trial_value;
        grad = trial_grad;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      report.termination = "line_search_exhausted";
      break;
    }
    pg = projected_ascent_direction(bounds, beta, grad);
    report.trace.push_back({beta, value, pg.norm()});
  }

  report.best_beta = beta;
  report.best_value = value;
  return report;
}

OptimizationReport multistart_ascent(
    const CriterionWithGradFn& evaluator,
    const std::vector<std::array<double, 2>>& bounds,
    const AscentOptions& options, const ExecPolicy& policy,
    const CriterionFn& value_only) {
  const int dims = static_cast<int>(bounds.size());
  const int starts = std::max(1, options.multistarts);

  // Kronecker low-discrepancy starts: deterministic, reasonably spread
  double phi = 2.0;
  for (int i = 0; i < 32; ++i) phi = std::pow(1.0 + phi, 1.0 / (dims + 1));
  std::vector<Eigen::VectorXd> start_points;
  start_points.reserve(static_cast<std::size_t>(starts));
  for (int j = 0; j < starts; ++j) {
    Eigen::VectorXd s(dims);
    for (int d = 0; d < dims; ++d) {
      const double alpha = std::fmod(std::pow(1.0 / phi, d + 1), 1.0);
      const double frac = std::fmod(0.5 + alpha * (j + 1), 1.0);
      s[d] = bounds[static_cast<std::size_t>(d)][0] +
             frac * (bounds[static_cast<std::size_t>(d)][1] -
                     bounds[static_cast<std::size_t>(d)][0]);
    }
    start_points.push_back(std::move(s));
  }

  std::vector<OptimizationReport> reports(static_cast<std::size_t>(starts));
  parallel_for(starts, policy, [&](int j) {
    reports[static_cast<std::size_t>(j)] = projected_gradient_ascent(
        evaluator, start_points[static_cast<std::size_t>(j)], bounds, options,
        value_only);
  });

  // winner by value, lexicographic tie-break: independent of start order
  int best = 0;
  for (int j = 1; j < starts; ++j) {
    const auto& cand = reports[static_cast<std::size_t>(j)];
    const auto& champ = reports[static_cast<std::size_t>(best)];
    if (cand.best_value > champ.best_value ||
        (cand.best_value == champ.best_value &&
         lexicographically_less(cand.best_beta, champ.best_beta)))
      best = j;
  }
  return reports[static_cast<std::size_t>(best)];
}

}  // namespace cfoed
