#include "cfoed/reference.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "cfoed/errors.hpp"
#include "cfoed/inverse.hpp"
#include "cfoed/rng.hpp"
#include "cfoed/sensitivity.hpp"

namespace cfoed::reference {

Eigen::VectorXd prior_mean_solution(const AffineParameterizedSystem& system,
                                    const PriorSpec& prior,
                                    const QuadratureRule& quad) {
  prior.validate();
  quad.validate();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(system.mesh.node_count());
  for (int q = 0; q < quad.point_count(); ++q) {
    const Eigen::VectorXd eps = quad.nodes.row(q);
    const ReducedSystem rs = assemble(system, eps);
    mean += quad.weights[q] * full_from_free(system, rs.llt.solve(rs.F));
  }
  return mean;
}

DataVector data_model(const AffineParameterizedSystem& system,
                      const ExperimentDesign& design, const PriorSpec& prior,
                      const QuadratureRule& quad) {
  const MeasurementOperator M = measurement_operator(design, system.mesh);
  DataVector data;
  data.values = M.rows * prior_mean_solution(system, prior, quad);
  return data;
}

namespace {

CriterionResult reduce(const QuadratureRule& quad,
                       std::vector<CriterionNode>&& nodes, int n_params,
                       int n_controls, bool with_gradient) {
  CriterionResult result;
  result.J = Eigen::MatrixXd::Zero(n_params, n_params);
  std::vector<Eigen::MatrixXd> dJ(
      static_cast<std::size_t>(n_controls),
      Eigen::MatrixXd::Zero(n_params, n_params));
  result.node_integrands.reserve(nodes.size());
  for (int q = 0; q < quad.point_count(); ++q) {
    CriterionNode& c = nodes[static_cast<std::size_t>(q)];
    result.J += quad.weights[q] * c.integrand;
    if (with_gradient) {
      for (int K = 0; K < n_controls; ++K)
        dJ[static_cast<std::size_t>(K)] +=
            quad.weights[q] * c.dintegrand_dbeta[static_cast<std::size_t>(K)];
    }
    result.node_integrands.push_back(std::move(c.integrand));
  }
  result.J = 0.5 * (result.J + result.J.transpose()).eval();
  if (n_params > 0) {
    result.min_eig = min_eigenpair(result.J).mu;
    if (with_gradient)
      result.grad_beta = min_eigenvalue_gradient(result.J, dJ);
    else
      result.grad_beta = Eigen::VectorXd();
  }
  return result;
}

}  // namespace

CriterionResult fisher_matrix(const AffineParameterizedSystem& system,
                              const ExperimentDesign& design,
                              const PriorSpec& prior, const QuadratureRule& quad,
                              bool with_gradient) {
  prior.validate();
  quad.validate();
  std::vector<CriterionNode> nodes;
  nodes.reserve(static_cast<std::size_t>(quad.point_count()));
  for (int q = 0; q < quad.point_count(); ++q) {
    const Eigen::VectorXd eps = quad.nodes.row(q);
    nodes.push_back(fisher_criterion_node(system, eps, design, with_gradient));
  }
  return reduce(quad, std::move(nodes), system.parameter_count(),
                design.count(), with_gradient);
}

CriterionResult ecfm_hessian(const AffineParameterizedSystem& system,
                             const ExperimentDesign& design,
                             const PriorSpec& prior, const QuadratureRule& quad,
                             bool with_gradient) {
  const Eigen::VectorXd mean = prior_mean_solution(system, prior, quad);
  const MeasurementOperator M = measurement_operator(design, system.mesh);
  DataVector data;
  data.values = M.rows * mean;
  std::vector<CriterionNode> nodes;
  nodes.reserve(static_cast<std::size_t>(quad.point_count()));
  for (int q = 0; q < quad.point_count(); ++q) {
    const Eigen::VectorXd eps = quad.nodes.row(q);
    nodes.push_back(
        ecfm_criterion_node(system, eps, design, data, mean, with_gradient));
  }
  return reduce(quad, std::move(nodes), system.parameter_count(),
                design.count(), with_gradient);
}

SweepResult grid_sweep(const CriterionFn& evaluator,
                       const std::vector<std::array<double, 2>>& bounds,
                       int resolution_per_dim) {
  const int dims = static_cast<int>(bounds.size());
  if (dims < 1) throw config_error("sweep needs at least one control");
  if (resolution_per_dim < 2)
    throw config_error("sweep resolution must be at least 2 per dimension");
  double total_d = 1.0;
  for (int d = 0; d < dims; ++d) total_d *= resolution_per_dim;
  if (total_d > 1e6) throw config_error("sweep grid exceeds 1e6 points");
  const int total = static_cast<int>(total_d);

  SweepResult result;
  result.points.resize(total, dims);
  result.values.resize(total);
  result.max_value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < total; ++r) {
    int rest = r;
    for (int d = dims - 1; d >= 0; --d) {
      const int idx = rest % resolution_per_dim;
      rest /= resolution_per_dim;
      const auto& b = bounds[static_cast<std::size_t>(d)];
      result.points(r, d) =
          b[0] + (b[1] - b[0]) * idx / (resolution_per_dim - 1);
    }
    try {
      result.values[r] = evaluator(result.points.row(r).transpose());
      result.max_value = std::max(result.max_value, result.values[r]);
    } catch (const std::exception& e) {
      result.values[r] = std::numeric_limits<double>::quiet_NaN();
      result.failed_indices.push_back(r);
      std::cerr << "warning: sweep point " << r << " skipped: " << e.what()
                << '\n';
    }
  }
  if (result.failed_indices.size() == static_cast<std::size_t>(total))
    throw optimization_error("every sweep point failed to evaluate");
  for (int r = 0; r < total; ++r) {
    if (std::isfinite(result.values[r]) &&
        result.values[r] >= result.max_value - 1e-10)
      result.argmax_indices.push_back(r);
  }
  return result;
}

NoiseStudyResult noise_study(const AffineParameterizedSystem& system,
                             const ModelProblemSpec& truth,
                             const std::vector<LabeledDesign>& designs,
                             const NoiseStudyConfig& config) {
  NoiseStudyResult out;
  for (std::size_t d = 0; d < designs.size(); ++d) {
    const LabeledDesign& ld = designs[d];
    std::vector<double> estimates;
    int failures = 0;
    for (int trial = 0; trial < config.trials; ++trial) {
      rng::Stream stream(config.seed,
                         d * static_cast<std::size_t>(config.trials) +
                             static_cast<std::size_t>(trial));
      DataVector data;
      data.values.resize(ld.design.count());
      for (int i = 0; i < ld.design.count(); ++i) {
        const double x = ld.design.positions[static_cast<std::size_t>(i)];
        const double clean =
            -(truth.b / (2.0 * truth.k)) * x * x +
            ((truth.p + truth.b) / truth.k) * x;
        data.values[i] = clean + config.noise.sigma * stream.next_normal();
      }
      TrialRecord rec;
      rec.design_label = ld.label;
      rec.trial = trial;
      try {
        const InverseResult inv = standard_inverse(
            system, ld.design, data,
            Eigen::VectorXd::Constant(1, config.eps0), {config.support});
        rec.eps_hat = inv.eps[0];
        estimates.push_back(rec.eps_hat);
      } catch (const error&) {
        rec.failed = true;
        rec.eps_hat = std::numeric_limits<double>::quiet_NaN();
        ++failures;
      }
      out.trials.push_back(std::move(rec));
    }
    DesignSummary summary;
    summary.label = ld.label;
    summary.failures = failures;
    const int n = static_cast<int>(estimates.size());
    if (n > 0) {
      double mean = 0.0;
      for (double e : estimates) mean += e;
      mean /= n;
      summary.mean = mean;
      if (n > 1) {
        double ss = 0.0;
        for (double e : estimates) ss += (e - mean) * (e - mean);
        summary.stddev = std::sqrt(ss / (n - 1));
        summary.stddev_available = true;
      }
    }
    out.summary.push_back(std::move(summary));
  }
  return out;
}

}  // namespace cfoed::reference
