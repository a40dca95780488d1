#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "cfoed/fem_system.hpp"
#include "cfoed/measurement.hpp"
#include "cfoed/saddle.hpp"

namespace cfoed {

struct InverseOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
};

struct InverseResult {
  Eigen::VectorXd eps;
  double objective = 0.0;
  int iterations = 0;
  Eigen::VectorXd lambda;  // constraint forces at the minimizer (ecfm only)
};

/// Minimize 0.5*|lambda(eps)|^2 over the support box, lambda obtained from
/// the constrained solve against the given data. The minimum objective is
/// the consistency diagnostic: zero iff some parameter setting reproduces
/// the data exactly. Scalar parameters use safeguarded Newton with a
/// golden-section fallback; multi-parameter uses damped Gauss-Newton.
InverseResult ecfm_inverse(const AffineParameterizedSystem& system,
                           const ExperimentDesign& design,
                           const DataVector& data, const Eigen::VectorXd& eps0,
                           const std::vector<std::array<double, 2>>& support,
                           const InverseOptions& options = {});

/// Minimize 0.5*|M theta(eps) - V|^2 via Gauss-Newton on the unconstrained
/// forward model.
InverseResult standard_inverse(
    const AffineParameterizedSystem& system, const ExperimentDesign& design,
    const DataVector& data, const Eigen::VectorXd& eps0,
    const std::vector<std::array<double, 2>>& support,
    const InverseOptions& options = {});

}  // namespace cfoed
