#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

#include "cfoed/mesh.hpp"
#include "cfoed/model_problem.hpp"

namespace cfoed {

struct DirichletBc {
  int dof = 0;
  double value = 0.0;
};

/// Discretized system with affine parameter dependence:
///   K(eps) = K0 + sum_a eps[a] * K_terms[a]
///   F(eps) = F0 + sum_a eps[a] * F_terms[a]
/// on all nodes, Dirichlet constraints listed separately. A zero-sized
/// matrix/vector in K_terms/F_terms stands for a structurally zero term;
/// both vectors have one entry per parameter.
struct AffineParameterizedSystem {
  Mesh1D mesh;
  Eigen::MatrixXd K0;
  std::vector<Eigen::MatrixXd> K_terms;
  Eigen::VectorXd F0;
  std::vector<Eigen::VectorXd> F_terms;
  std::vector<DirichletBc> dirichlet;

  int parameter_count() const { return static_cast<int>(K_terms.size()); }
  std::vector<int> free_dofs() const;
  void validate() const;

  Eigen::MatrixXd stiffness_at(const Eigen::VectorXd& eps) const;
  Eigen::VectorXd load_at(const Eigen::VectorXd& eps) const;
};

/// Unit-coefficient operators used to assemble the case systems; exposed
/// for tests and synthetic multi-parameter systems.
Eigen::MatrixXd unit_stiffness_matrix(const Mesh1D& mesh);
Eigen::VectorXd distributed_unit_load(const Mesh1D& mesh);
Eigen::VectorXd right_traction_unit_load(const Mesh1D& mesh);

/// Affine system for one of the four model-problem cases. The unknown
/// parameter enters the load (BC/Source/MisspecifiedSource) or the
/// operator (Material); all remaining constants come from spec.
AffineParameterizedSystem build_case_system(CaseKind kind,
                                            const ModelProblemSpec& spec,
                                            const Mesh1D& mesh);

/// Parameter-free discretization of the data-generating system itself
/// (every constant from spec).
AffineParameterizedSystem build_true_system(const ModelProblemSpec& spec,
                                            const Mesh1D& mesh);

/// System restricted to free DOFs with prescribed-value lifting applied to
/// the load. Construction verifies positive definiteness; the factorization
/// is kept for reuse.
struct ReducedSystem {
  Eigen::MatrixXd K;
  Eigen::VectorXd F;
  std::vector<int> free_dofs;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

ReducedSystem assemble(const AffineParameterizedSystem& system,
                       const Eigen::VectorXd& eps);

/// Nodal solution of K(eps) theta = F(eps) with Dirichlet values
/// re-inserted (full node vector).
Eigen::VectorXd forward_solve(const AffineParameterizedSystem& system,
                              const Eigen::VectorXd& eps);

/// Scatter free-DOF values into a full node vector, filling prescribed DOFs
/// with their Dirichlet values.
Eigen::VectorXd full_from_free(const AffineParameterizedSystem& system,
                               const Eigen::VectorXd& free_values);

}  // namespace cfoed
