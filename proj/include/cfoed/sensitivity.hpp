#pragma once

#include <Eigen/Core>
#include <vector>

#include "cfoed/saddle.hpp"

namespace cfoed {

/// Partial derivatives of the saddle matrix D and right-hand side Q with
/// respect to model parameters (eps, P of them) and experimental controls
/// (beta, C of them). A zero-sized entry stands for a structurally zero
/// derivative. Flattened index order: [a*P+g] for (eps_a, eps_g),
/// [a*C+K] for (eps_a, beta_K), [(a*P+g)*C+K] for third order.
struct SystemDerivatives {
  std::vector<Eigen::MatrixXd> dD_deps;             // P
  std::vector<Eigen::MatrixXd> dD_dbeta;            // C
  std::vector<Eigen::MatrixXd> d2D_deps2;           // P*P
  std::vector<Eigen::MatrixXd> d2D_depsdbeta;       // P*C
  std::vector<Eigen::MatrixXd> d3D_depsdepsdbeta;   // P*P*C
  std::vector<Eigen::VectorXd> dQ_deps;             // P
  std::vector<Eigen::VectorXd> dQ_dbeta;            // C
  std::vector<Eigen::VectorXd> d2Q_deps2;           // P*P
  std::vector<Eigen::VectorXd> d2Q_depsdbeta;       // P*C

  int n = 0;
  int n_params = 0;
  int n_controls = 0;

  void validate() const;  // dimension conformance -> contract_error
};

/// Solution derivatives obtained by back-substituting the factorized D
/// against the chained right-hand sides, in dependency order
/// (first order) -> (second order) -> (third order).
struct SolutionDerivatives {
  Eigen::MatrixXd dy_deps;                          // n x P
  Eigen::MatrixXd dy_dbeta;                         // n x C
  std::vector<Eigen::VectorXd> d2y_deps2;           // P*P
  std::vector<Eigen::VectorXd> d2y_depsdbeta;       // P*C
  std::vector<Eigen::VectorXd> d3y_depsdepsdbeta;   // P*P*C
};

SolutionDerivatives solve_sensitivity_cascade(const SystemDerivatives& sd,
                                              const SaddleOperator& op,
                                              const Eigen::VectorXd& y);

/// Residual of each defining linear relation with the computed derivatives
/// substituted back, relative to the scale of its terms. All five should
/// sit at solver precision.
struct CascadeResiduals {
  double first_eps = 0.0;
  double first_beta = 0.0;
  double second_eps2 = 0.0;
  double second_mixed = 0.0;
  double third = 0.0;
  double max() const;
};

CascadeResiduals cascade_residuals(const SystemDerivatives& sd,
                                   const Eigen::MatrixXd& D,
                                   const Eigen::VectorXd& y,
                                   const SolutionDerivatives& sol);

/// Saddle derivatives for an affine system: the operator blocks are
/// differentiated analytically, the data block's beta-dependence comes from
/// re-measuring nodal_data_source (pass the prior-averaged nodal solution
/// when the data model tracks the design; pass nullptr for fixed measured
/// data). Affine structure makes every second- and third-order D (and
/// second-order Q) derivative structurally zero.
SystemDerivatives build_saddle_derivatives(
    const AffineParameterizedSystem& system, const ExperimentDesign& design,
    const Eigen::VectorXd* nodal_data_source);

/// Constraint force and its derivative blocks at one (eps, design, data)
/// point: the saddle solve plus the cascade, truncated to the constraint
/// rows. Beta-derivative blocks are filled only when
/// with_beta_derivatives is set.
struct ConstrainedDerivatives {
  SaddleSolution solution;
  Eigen::MatrixXd dlambda_deps;                        // C x P
  std::vector<Eigen::VectorXd> d2lambda_deps2;         // P*P entries of length C
  bool has_beta_derivatives = false;
  Eigen::MatrixXd dlambda_dbeta;                       // C x C
  std::vector<Eigen::VectorXd> d2lambda_depsdbeta;     // P*C
  std::vector<Eigen::VectorXd> d3lambda_depsdepsdbeta; // P*P*C
};

ConstrainedDerivatives constrained_derivatives(
    const AffineParameterizedSystem& system, const Eigen::VectorXd& eps,
    const ExperimentDesign& design, const DataVector& data,
    const Eigen::VectorXd* nodal_data_source, bool with_beta_derivatives);

/// d theta_free / d eps for the unconstrained system K(eps) theta = F(eps),
/// one column per parameter.
Eigen::MatrixXd state_sensitivities(const AffineParameterizedSystem& system,
                                    const Eigen::VectorXd& eps);
Eigen::MatrixXd state_sensitivities(const AffineParameterizedSystem& system,
                                    const Eigen::VectorXd& eps,
                                    const ReducedSystem& reduced,
                                    const Eigen::VectorXd& theta_free);

/// Minimum eigenvalue, its unit eigenvector, and the distance to the next
/// eigenvalue (+inf for 1x1 input).
struct EigenPair {
  double mu = 0.0;
  Eigen::VectorXd q;
  double gap = 0.0;
};

EigenPair min_eigenpair(const Eigen::MatrixXd& J);

/// Gradient of the minimum eigenvalue of symmetric J(beta):
/// d mu / d beta_K = q^T (dJ/dbeta_K) q, valid while the minimum eigenvalue
/// stays simple. Raises degenerate_eigenvalue_error when the relative gap
/// falls below the tolerance.
Eigen::VectorXd min_eigenvalue_gradient(
    const Eigen::MatrixXd& J, const std::vector<Eigen::MatrixXd>& dJ_dbeta,
    double relative_gap_tolerance = 1e-8);

}  // namespace cfoed
