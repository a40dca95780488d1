#pragma once

#include <vector>

#include "cfoed/measurement.hpp"
#include "cfoed/saddle.hpp"
#include "cfoed/sensitivity.hpp"

// Finite-difference oracle for the derivative cascade. Each order is
// checked against central differences (step 1e-5 scaled) of the next-lower
// order re-solved at shifted points: first order against re-solved y,
// second order against re-solved first-order blocks, third order against
// re-solved mixed blocks. Shifting a control re-measures the data from the
// nodal source field, matching the data model's position dependence.
namespace cfoed::testing {

struct CascadePoint {
  Eigen::VectorXd y;
  SolutionDerivatives sol;
};

inline CascadePoint cascade_at(const AffineParameterizedSystem& system,
                               const Eigen::VectorXd& eps,
                               const std::vector<double>& betas,
                               const Eigen::VectorXd& source) {
  ExperimentDesign design;
  design.positions = betas;
  design.min_separation = 0.0;
  DataVector data;
  data.values = measurement_operator(design, system.mesh).rows * source;
  const SaddleOperator op(system, eps, design, data);
  const SystemDerivatives sd = build_saddle_derivatives(system, design, &source);
  CascadePoint point;
  point.y = op.solution();
  point.sol = solve_sensitivity_cascade(sd, op, point.y);
  return point;
}

struct FdBlocks {
  Eigen::MatrixXd dy_deps;
  Eigen::MatrixXd dy_dbeta;
  std::vector<Eigen::VectorXd> d2y_deps2;
  std::vector<Eigen::VectorXd> d2y_depsdbeta;
  std::vector<Eigen::VectorXd> d3y;
};

inline FdBlocks cascade_fd_blocks(const AffineParameterizedSystem& system,
                                  const Eigen::VectorXd& eps,
                                  const std::vector<double>& betas,
                                  const Eigen::VectorXd& source,
                                  double step = 1e-5) {
  const int P = static_cast<int>(eps.size());
  const int C = static_cast<int>(betas.size());

  auto at_eps = [&](int a, double h) {
    Eigen::VectorXd e = eps;
    e[a] += h * std::max(1.0, std::abs(e[a]));
    return cascade_at(system, e, betas, source);
  };
  auto eps_step = [&](int a) { return step * std::max(1.0, std::abs(eps[a])); };
  auto at_beta = [&](int K, double h) {
    std::vector<double> b = betas;
    b[static_cast<std::size_t>(K)] += h;
    return cascade_at(system, eps, b, source);
  };

  FdBlocks out;
  const CascadePoint base = cascade_at(system, eps, betas, source);
  const int n = static_cast<int>(base.y.size());
  out.dy_deps.resize(n, P);
  out.dy_dbeta.resize(n, C);

  std::vector<CascadePoint> eps_plus, eps_minus;
  for (int a = 0; a < P; ++a) {
    eps_plus.push_back(at_eps(a, step));
    eps_minus.push_back(at_eps(a, -step));
    out.dy_deps.col(a) =
        (eps_plus.back().y - eps_minus.back().y) / (2.0 * eps_step(a));
  }
  std::vector<CascadePoint> beta_plus, beta_minus;
  for (int K = 0; K < C; ++K) {
    beta_plus.push_back(at_beta(K, step));
    beta_minus.push_back(at_beta(K, -step));
    out.dy_dbeta.col(K) = (beta_plus.back().y - beta_minus.back().y) /
                          (2.0 * step);
  }

  for (int a = 0; a < P; ++a)
    for (int g = 0; g < P; ++g)
      out.d2y_deps2.push_back(
          (eps_plus[static_cast<std::size_t>(a)].sol.dy_deps.col(g) -
           eps_minus[static_cast<std::size_t>(a)].sol.dy_deps.col(g)) /
          (2.0 * eps_step(a)));

  for (int a = 0; a < P; ++a)
    for (int K = 0; K < C; ++K)
      out.d2y_depsdbeta.push_back(
          (beta_plus[static_cast<std::size_t>(K)].sol.dy_deps.col(a) -
           beta_minus[static_cast<std::size_t>(K)].sol.dy_deps.col(a)) /
          (2.0 * step));

  for (int a = 0; a < P; ++a)
    for (int g = 0; g < P; ++g)
      for (int K = 0; K < C; ++K) {
        const std::size_t ag =
            static_cast<std::size_t>(a) * static_cast<std::size_t>(P) +
            static_cast<std::size_t>(g);
        out.d3y.push_back(
            (beta_plus[static_cast<std::size_t>(K)].sol.d2y_deps2[ag] -
             beta_minus[static_cast<std::size_t>(K)].sol.d2y_deps2[ag]) /
            (2.0 * step));
      }
  return out;
}

}  // namespace cfoed::testing
