#include "cfoed/fem_system.hpp"

#include <algorithm>

#include "cfoed/errors.hpp"

namespace cfoed {

std::vector<int> AffineParameterizedSystem::free_dofs() const {
  std::vector<bool> fixed(static_cast<std::size_t>(mesh.node_count()), false);
  for (const DirichletBc& bc : dirichlet)
    fixed[static_cast<std::size_t>(bc.dof)] = true;
  std::vector<int> free;
  free.reserve(fixed.size());
  for (int i = 0; i < mesh.node_count(); ++i)
    if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
  return free;
}

void AffineParameterizedSystem::validate() const {
  mesh.validate();
  const int n = mesh.node_count();
  if (K0.rows() != n || K0.cols() != n)
    throw contract_error("K0 dimension does not match the mesh");
  if (F0.size() != n) throw contract_error("F0 dimension does not match the mesh");
  if (K_terms.size() != F_terms.size())
    throw contract_error("K_terms and F_terms must have one entry per parameter");
  for (const auto& K : K_terms) {
    if (K.size() != 0 && (K.rows() != n || K.cols() != n))
      throw contract_error("K term dimension does not match the mesh");
  }
  for (const auto& F : F_terms) {
    if (F.size() != 0 && F.size() != n)
      throw contract_error("F term dimension does not match the mesh");
  }
  for (const DirichletBc& bc : dirichlet) {
    if (bc.dof < 0 || bc.dof >= n)
      throw contract_error("Dirichlet DOF out of range");
  }
}

Eigen::MatrixXd AffineParameterizedSystem::stiffness_at(
    const Eigen::VectorXd& eps) const {
  if (eps.size() != parameter_count())
    throw contract_error("parameter vector has the wrong length");
  Eigen::MatrixXd K = K0;
  for (int a = 0; a < parameter_count(); ++a) {
    const Eigen::MatrixXd& Ka = K_terms[static_cast<std::size_t>(a)];
    if (Ka.size() != 0) K += eps[a] * Ka;
  }
  return K;
}

Eigen::VectorXd AffineParameterizedSystem::load_at(
    const Eigen::VectorXd& eps) const {
  if (eps.size() != parameter_count())
    throw contract_error("parameter vector has the wrong length");
  Eigen::VectorXd F = F0;
  for (int a = 0; a < parameter_count(); ++a) {
    const Eigen::VectorXd& Fa = F_terms[static_cast<std::size_t>(a)];
    if (Fa.size() != 0) F += eps[a] * Fa;
  }
  return F;
}

Eigen::MatrixXd unit_stiffness_matrix(const Mesh1D& mesh) {
  const int n = mesh.node_count();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double inv_h = 1.0 / mesh.element_width(e);
    K(e, e) += inv_h;
    K(e + 1, e + 1) += inv_h;
    K(e, e + 1) -= inv_h;
    K(e + 1, e) -= inv_h;
  }
  return K;
}

Eigen::VectorXd distributed_unit_load(const Mesh1D& mesh) {
  const int n = mesh.node_count();
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double half_h = 0.5 * mesh.element_width(e);
    F[e] += half_h;
    F[e + 1] += half_h;
  }
  return F;
}

Eigen::VectorXd right_traction_unit_load(const Mesh1D& mesh) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(mesh.node_count());
  F[mesh.node_count() - 1] = 1.0;
  return F;
}

AffineParameterizedSystem build_case_system(CaseKind kind,
                                            const ModelProblemSpec& spec,
                                            const Mesh1D& mesh) {
  spec.validate();
  mesh.validate();

  AffineParameterizedSystem sys;
  sys.mesh = mesh;
  sys.dirichlet = {DirichletBc{0, 0.0}};

  const Eigen::MatrixXd K_unit = unit_stiffness_matrix(mesh);
  const Eigen::VectorXd load = distributed_unit_load(mesh);
  const Eigen::VectorXd traction = right_traction_unit_load(mesh);
  const int n = mesh.node_count();

  switch (kind) {
    case CaseKind::ParameterizedBC:
      sys.K0 = spec.k * K_unit;
      sys.K_terms = {Eigen::MatrixXd()};
      sys.F0 = spec.b * load;
      sys.F_terms = {traction};
      break;
    case CaseKind::ParameterizedSource:
      sys.K0 = spec.k * K_unit;
      sys.K_terms = {Eigen::MatrixXd()};
      sys.F0 = spec.p * traction;
      sys.F_terms = {load};
      break;
    case CaseKind::ParameterizedMaterial:
      sys.K0 = Eigen::MatrixXd::Zero(n, n);
      sys.K_terms = {K_unit};
      sys.F0 = spec.b * load + spec.p * traction;
      sys.F_terms = {Eigen::VectorXd()};
      break;
    case CaseKind::MisspecifiedSource:
      // source unknown, homogeneous Neumann end: no traction contribution
      sys.K0 = spec.k * K_unit;
      sys.K_terms = {Eigen::MatrixXd()};
      sys.F0 = Eigen::VectorXd::Zero(n);
      sys.F_terms = {load};
      break;
  }
  return sys;
}

AffineParameterizedSystem build_true_system(const ModelProblemSpec& spec,
                                            const Mesh1D& mesh) {
  spec.validate();
  mesh.validate();
  AffineParameterizedSystem sys;
  sys.mesh = mesh;
  sys.dirichlet = {DirichletBc{0, 0.0}};
  sys.K0 = spec.k * unit_stiffness_matrix(mesh);
  sys.F0 = spec.b * distributed_unit_load(mesh) +
           spec.p * right_traction_unit_load(mesh);
  return sys;
}

ReducedSystem assemble(const AffineParameterizedSystem& system,
                       const Eigen::VectorXd& eps) {
  system.validate();
  const Eigen::MatrixXd K_full = system.stiffness_at(eps);
  const Eigen::VectorXd F_full = system.load_at(eps);

  ReducedSystem rs;
  rs.free_dofs = system.free_dofs();
  const int nf = static_cast<int>(rs.free_dofs.size());
  rs.K.resize(nf, nf);
  rs.F.resize(nf);
  for (int i = 0; i < nf; ++i) {
    rs.F[i] = F_full[rs.free_dofs[static_cast<std::size_t>(i)]];
    for (int j = 0; j < nf; ++j)
      rs.K(i, j) = K_full(rs.free_dofs[static_cast<std::size_t>(i)],
                          rs.free_dofs[static_cast<std::size_t>(j)]);
  }
  // prescribed-value lifting
  for (const DirichletBc& bc : system.dirichlet) {
    if (bc.value == 0.0) continue;
    for (int i = 0; i < nf; ++i)
      rs.F[i] -= K_full(rs.free_dofs[static_cast<std::size_t>(i)], bc.dof) *
                 bc.value;
  }

  rs.llt.compute(rs.K);
  if (rs.llt.info() != Eigen::Success)
    throw assembly_error(
        "reduced stiffness is not positive definite (parameter outside the "
        "valid range)");
  return rs;
}

Eigen::VectorXd full_from_free(const AffineParameterizedSystem& system,
                               const Eigen::VectorXd& free_values) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(system.mesh.node_count());
  for (const DirichletBc& bc : system.dirichlet) full[bc.dof] = bc.value;
  const std::vector<int> free = system.free_dofs();
  if (free_values.size() != static_cast<Eigen::Index>(free.size()))
    throw contract_error("free-value vector has the wrong length");
  for (std::size_t i = 0; i < free.size(); ++i)
    full[free[i]] = free_values[static_cast<Eigen::Index>(i)];
  return full;
}

Eigen::VectorXd forward_solve(const AffineParameterizedSystem& system,
                              const Eigen::VectorXd& eps) {
  const ReducedSystem rs = assemble(system, eps);
  const Eigen::VectorXd theta_free = rs.llt.solve(rs.F);
  if (!theta_free.allFinite())
    throw assembly_error("forward solve produced non-finite values");
  return full_from_free(system, theta_free);
}

}  // namespace cfoed
