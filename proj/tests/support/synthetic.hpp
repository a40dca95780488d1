#pragma once

#include <random>

#include "cfoed/fem_system.hpp"
#include "cfoed/measurement.hpp"
#include "cfoed/prior.hpp"

// Test-only builders: a two-parameter system (stiffness and source both
// unknown) to exercise the multi-parameter paths, and randomized designs.
namespace cfoed::testing {

// eps[0] scales the operator, eps[1] the distributed source; the traction p
// is known. Solutions are nonlinear in eps[0], so second-order parameter
// derivatives are nonzero.
inline AffineParameterizedSystem two_parameter_system(
    const ModelProblemSpec& spec, const Mesh1D& mesh) {
  AffineParameterizedSystem sys;
  sys.mesh = mesh;
  sys.dirichlet = {DirichletBc{0, 0.0}};
  const int n = mesh.node_count();
  sys.K0 = Eigen::MatrixXd::Zero(n, n);
  sys.K_terms = {unit_stiffness_matrix(mesh), Eigen::MatrixXd()};
  sys.F0 = spec.p * right_traction_unit_load(mesh);
  sys.F_terms = {Eigen::VectorXd(), distributed_unit_load(mesh)};
  return sys;
}

inline PriorSpec two_parameter_prior() {
  return PriorSpec::uniform(0.8, 1.4).and_uniform(0.5, 1.5);
}

// positions spread over [lo, hi] with at least min_gap between them
inline ExperimentDesign random_design(std::mt19937_64& gen, int count,
                                      double lo, double hi, double min_gap) {
  std::uniform_real_distribution<double> pick(lo, hi);
  ExperimentDesign design;
  design.min_separation = min_gap;
  while (static_cast<int>(design.positions.size()) < count) {
    const double x = pick(gen);
    bool ok = true;
    for (double other : design.positions)
      if (std::abs(x - other) < 1.5 * min_gap) ok = false;
    if (ok) design.positions.push_back(x);
  }
  return design;
}

}  // namespace cfoed::testing
