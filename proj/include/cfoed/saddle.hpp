#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <vector>

#include "cfoed/fem_system.hpp"
#include "cfoed/measurement.hpp"

namespace cfoed {

struct DataVector {
  Eigen::VectorXd values;  // one entry per measurement

  int count() const { return static_cast<int>(values.size()); }
};

/// Constrained equilibrium coupling state, constraint forces, and the data
/// agreement condition, arranged symmetrically:
///
///   [ K(eps)   -Gamma ] [ theta  ]   [ F(eps) ]
///   [ -Gamma^T    0   ] [ lambda ] = [ -V     ]
///
/// with Gamma = M^T on free DOFs. The sign arrangement keeps the matrix
/// symmetric while the solved lambda is the force added on the right-hand
/// side of the equilibrium (K theta = F + Gamma lambda), i.e. the constraint
/// force with the same orientation as the applied loads.
struct SaddleSystem {
  Eigen::MatrixXd D;
  Eigen::VectorXd Q;
  int n_free = 0;
  int n_constraints = 0;
  std::vector<int> free_dofs;
};

SaddleSystem build_saddle(const AffineParameterizedSystem& system,
                          const Eigen::VectorXd& eps,
                          const ExperimentDesign& design,
                          const DataVector& data);

/// Factorized saddle operator; one factorization serves the solve and every
/// sensitivity right-hand side. Construction fails with
/// design_degeneracy_error when the matrix is (numerically) singular.
class SaddleOperator {
 public:
  SaddleOperator(const AffineParameterizedSystem& system,
                 const Eigen::VectorXd& eps, const ExperimentDesign& design,
                 const DataVector& data);

  const SaddleSystem& system() const { return sys_; }
  const Eigen::VectorXd& solution() const { return y_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  Eigen::VectorXd theta_free() const { return y_.head(sys_.n_free); }
  Eigen::VectorXd lambda() const { return y_.tail(sys_.n_constraints); }

 private:
  SaddleSystem sys_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd y_;
};

struct SaddleSolution {
  Eigen::VectorXd theta;   // all nodes, Dirichlet values re-inserted
  Eigen::VectorXd lambda;  // constraint forces, one per measurement
  double objective = 0.0;  // 0.5 * |lambda|^2
};

SaddleSolution solve_constrained(const AffineParameterizedSystem& system,
                                 const Eigen::VectorXd& eps,
                                 const ExperimentDesign& design,
                                 const DataVector& data);

}  // namespace cfoed
