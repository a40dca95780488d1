#pragma once

#include <Eigen/Core>
#include <vector>

#include "cfoed/fem_system.hpp"
#include "cfoed/measurement.hpp"
#include "cfoed/parallel.hpp"
#include "cfoed/prior.hpp"
#include "cfoed/saddle.hpp"

namespace cfoed {

/// Prior-averaged criterion matrix over the model parameters, its minimum
/// eigenvalue (the E-criterion value), the eigenvalue's gradient with
/// respect to the measurement positions, and the unweighted per-quadrature-
/// node integrands kept as diagnostics.
struct CriterionResult {
  Eigen::MatrixXd J;
  double min_eig = 0.0;
  Eigen::VectorXd grad_beta;
  std::vector<Eigen::MatrixXd> node_integrands;
};

/// Shared state for evaluating both design criteria against one system and
/// prior: the per-node stiffness factorizations and forward solutions are
/// built once and reused across designs (the prior-averaged response only
/// changes through the measurement operator).
class CriterionEvaluator {
 public:
  CriterionEvaluator(const AffineParameterizedSystem& system, PriorSpec prior,
                     QuadratureRule quad, ExecPolicy policy = {});

  /// Prior-averaged nodal solution (all nodes).
  const Eigen::VectorXd& prior_mean_solution() const { return mean_theta_; }

  /// Data model: prior-averaged response measured at the design positions.
  DataVector data_model(const ExperimentDesign& design) const;

  /// Prediction-sensitivity criterion (Gauss-Newton information matrix of
  /// the unconstrained fit), averaged over the prior. A constant
  /// noise-variance factor is omitted; it scales the matrix uniformly and
  /// cannot move the argmax.
  CriterionResult fisher(const ExperimentDesign& design,
                         bool with_gradient = true) const;

  /// Constraint-force curvature criterion: prior average of the full
  /// Hessian of 0.5*|lambda|^2 in the model parameters, with data taken
  /// from the data model. The second-order lambda term is retained (no
  /// Gauss-Newton truncation).
  CriterionResult ecfm(const ExperimentDesign& design,
                       bool with_gradient = true) const;

  const AffineParameterizedSystem& system() const { return *system_; }
  const PriorSpec& prior() const { return prior_; }
  const QuadratureRule& quadrature() const { return quad_; }

 private:
  const AffineParameterizedSystem* system_;
  PriorSpec prior_;
  QuadratureRule quad_;
  ExecPolicy policy_;
  std::vector<ReducedSystem> node_systems_;
  std::vector<Eigen::VectorXd> node_theta_full_;
  Eigen::VectorXd mean_theta_;
};

/// Unweighted criterion integrand at one parameter value (one quadrature
/// node), with its per-control derivatives when requested. These are the
/// building blocks of the prior averages; exposed for the serial reference
/// path and for per-node diagnostics in tests.
struct CriterionNode {
  Eigen::MatrixXd integrand;                      // P x P
  std::vector<Eigen::MatrixXd> dintegrand_dbeta;  // C entries when requested
};

CriterionNode fisher_criterion_node(const AffineParameterizedSystem& system,
                                    const Eigen::VectorXd& eps,
                                    const ExperimentDesign& design,
                                    bool with_gradient);

CriterionNode ecfm_criterion_node(const AffineParameterizedSystem& system,
                                  const Eigen::VectorXd& eps,
                                  const ExperimentDesign& design,
                                  const DataVector& data,
                                  const Eigen::VectorXd& mean_theta,
                                  bool with_gradient);

/// One-shot conveniences over a freshly built evaluator.
DataVector data_model(const AffineParameterizedSystem& system,
                      const ExperimentDesign& design, const PriorSpec& prior,
                      const QuadratureRule& quad, const ExecPolicy& policy = {});
CriterionResult fisher_matrix(const AffineParameterizedSystem& system,
                              const ExperimentDesign& design,
                              const PriorSpec& prior,
                              const QuadratureRule& quad,
                              const ExecPolicy& policy = {});
CriterionResult ecfm_hessian(const AffineParameterizedSystem& system,
                             const ExperimentDesign& design,
                             const PriorSpec& prior, const QuadratureRule& quad,
                             const ExecPolicy& policy = {});

}  // namespace cfoed
