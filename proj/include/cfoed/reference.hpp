#pragma once

#include "cfoed/design_optimizer.hpp"
#include "cfoed/noise_study.hpp"
#include "cfoed/oed_objectives.hpp"

// Plain serial implementations of the parallel kernels, written as straight
// loops without the slot/reduce orchestration. Kept for testing (the
// parallel kernels must reproduce them bit-for-bit at any thread count) and
// as the baseline in the benchmark target.
namespace cfoed::reference {

Eigen::VectorXd prior_mean_solution(const AffineParameterizedSystem& system,
                                    const PriorSpec& prior,
                                    const QuadratureRule& quad);

DataVector data_model(const AffineParameterizedSystem& system,
                      const ExperimentDesign& design, const PriorSpec& prior,
                      const QuadratureRule& quad);

CriterionResult fisher_matrix(const AffineParameterizedSystem& system,
                              const ExperimentDesign& design,
                              const PriorSpec& prior,
                              const QuadratureRule& quad,
                              bool with_gradient = true);

CriterionResult ecfm_hessian(const AffineParameterizedSystem& system,
                             const ExperimentDesign& design,
                             const PriorSpec& prior, const QuadratureRule& quad,
                             bool with_gradient = true);

SweepResult grid_sweep(const CriterionFn& evaluator,
                       const std::vector<std::array<double, 2>>& bounds,
                       int resolution_per_dim);

NoiseStudyResult noise_study(const AffineParameterizedSystem& system,
                             const ModelProblemSpec& truth,
                             const std::vector<LabeledDesign>& designs,
                             const NoiseStudyConfig& config);

}  // namespace cfoed::reference
