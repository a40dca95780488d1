#pragma once

#include <vector>

#include "cfoed/model_problem.hpp"
#include "cfoed/prior.hpp"

namespace cfoed::oracle {

/// Exact solution of the data-generating system at x in [0,1]:
///   u(x) = -(b/2k) x^2 + ((p+b)/k) x.
double true_solution(const ModelProblemSpec& spec, double x);

/// Noiseless measurement at position beta: v(beta) = u(beta).
double data_at(const ModelProblemSpec& spec, double beta);

/// Constraint force of a case at parameter value eps, measurement at beta,
/// with its parameter derivatives and the curvature integrand
/// (dlambda/deps)^2 + lambda * d2lambda/deps2. The force is affine in eps
/// in every case, so d2lambda_deps2 is identically zero.
struct OracleEvaluation {
  double lambda = 0.0;
  double dlambda_deps = 0.0;
  double d2lambda_deps2 = 0.0;
  double objective_integrand = 0.0;
};

OracleEvaluation constraint_force(CaseKind kind, const ModelProblemSpec& spec,
                                  double eps, double beta);

/// Closed-form constraint-force design objective
///   integral of [(dlambda/deps)^2 + lambda d2lambda/deps2] rho(eps) deps.
/// The integrand is independent of eps in every case, so the value does not
/// depend on the prior; the prior argument keeps the signature aligned with
/// the discretized path and is validated only.
double ecfm_design_objective(CaseKind kind, const ModelProblemSpec& spec,
                             const PriorSpec& prior, double beta);

/// Closed-form prediction-sensitivity design objective
///   integral of (dw(beta)/deps)^2 rho(eps) deps,
/// with w the unconstrained model prediction. Prior-dependent only for
/// ParameterizedMaterial, through E[eps^-4].
double fisher_design_objective(CaseKind kind, const ModelProblemSpec& spec,
                               const PriorSpec& prior, double beta);

/// Argmax set of the requested criterion over beta in [0,1]. Indifference
/// (constant objective) is reported with entire_interval = true; knife-edge
/// ties return both endpoints.
struct OptimalBetaSet {
  bool entire_interval = false;
  std::vector<double> points;  // ascending
};

OptimalBetaSet optimal_beta_analytic(CaseKind kind,
                                     const ModelProblemSpec& spec,
                                     Criterion criterion);

}  // namespace cfoed::oracle
