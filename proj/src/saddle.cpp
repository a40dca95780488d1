#include "cfoed/saddle.hpp"

#include "cfoed/errors.hpp"

namespace cfoed {

SaddleSystem build_saddle(const AffineParameterizedSystem& system,
                          const Eigen::VectorXd& eps,
                          const ExperimentDesign& design,
                          const DataVector& data) {
  if (data.count() != design.count())
    throw contract_error("data length must match the number of measurements");

  const ReducedSystem rs = assemble(system, eps);
  const MeasurementOperator M = measurement_operator(design, system.mesh);

  const int nf = static_cast<int>(rs.free_dofs.size());
  const int C = design.count();

  Eigen::MatrixXd Mf(C, nf);
  for (int j = 0; j < nf; ++j)
    Mf.col(j) = M.rows.col(rs.free_dofs[static_cast<std::size_t>(j)]);

  // measured values net of the prescribed-DOF contribution
  Eigen::VectorXd v = data.values;
  for (const DirichletBc& bc : system.dirichlet) {
    if (bc.value != 0.0) v -= M.rows.col(bc.dof) * bc.value;
  }

  SaddleSystem s;
  s.n_free = nf;
  s.n_constraints = C;
  s.free_dofs = rs.free_dofs;
  s.D = Eigen::MatrixXd::Zero(nf + C, nf + C);
  s.D.topLeftCorner(nf, nf) = rs.K;
  s.D.topRightCorner(nf, C) = -Mf.transpose();
  s.D.bottomLeftCorner(C, nf) = -Mf;
  s.Q.resize(nf + C);
  s.Q.head(nf) = rs.F;
  s.Q.tail(C) = -v;
  return s;
}

SaddleOperator::SaddleOperator(const AffineParameterizedSystem& system,
                               const Eigen::VectorXd& eps,
                               const ExperimentDesign& design,
                               const DataVector& data)
    : sys_(build_saddle(system, eps, design, data)) {
  lu_.compute(sys_.D);
  // partial-pivot LU leaves a (near-)zero pivot for singular saddle
  // matrices; rcond() can miss consistent singular systems, the pivot
  // ratio cannot
  if (sys_.D.size() > 0) {
    const Eigen::VectorXd pivots = lu_.matrixLU().diagonal().cwiseAbs();
    if (pivots.minCoeff() < 1e-13 * pivots.maxCoeff())
      throw design_degeneracy_error(
          "saddle matrix is numerically singular (coincident measurements or "
          "a measurement on an eliminated Dirichlet node)");
  }
  y_ = lu_.solve(sys_.Q);
  if (!y_.allFinite())
    throw design_degeneracy_error("saddle solve produced non-finite values");
}

Eigen::VectorXd SaddleOperator::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != sys_.D.rows())
    throw contract_error("right-hand side has the wrong length");
  return lu_.solve(rhs);
}

SaddleSolution solve_constrained(const AffineParameterizedSystem& system,
                                 const Eigen::VectorXd& eps,
                                 const ExperimentDesign& design,
                                 const DataVector& data) {
  const SaddleOperator op(system, eps, design, data);
  SaddleSolution sol;
  sol.theta = full_from_free(system, op.theta_free());
  sol.lambda = op.lambda();
  sol.objective = 0.5 * sol.lambda.squaredNorm();
  return sol;
}

}  // namespace cfoed
