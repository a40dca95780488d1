#include "cfoed/sensitivity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cfoed/errors.hpp"

namespace cfoed {

namespace {

// empty matrices stand for structural zeros
inline void sub_mat_vec(Eigen::VectorXd& acc, const Eigen::MatrixXd& A,
                        const Eigen::VectorXd& v) {
  if (A.size() != 0) acc.noalias() -= A * v;
}

inline double term_scale(const Eigen::MatrixXd& A, const Eigen::VectorXd& v) {
  if (A.size() == 0) return 0.0;
  return (A * v).cwiseAbs().maxCoeff();
}

void check_block(const std::vector<Eigen::MatrixXd>& blocks, std::size_t count,
                 int n, const char* what) {
  if (blocks.size() != count)
    throw contract_error(std::string("wrong number of ") + what + " blocks");
  for (const auto& B : blocks) {
    if (B.size() != 0 && (B.rows() != n || B.cols() != n))
      throw contract_error(std::string(what) + " block has wrong dimensions");
  }
}

void check_vecs(const std::vector<Eigen::VectorXd>& vecs, std::size_t count,
                int n, const char* what) {
  if (vecs.size() != count)
    throw contract_error(std::string("wrong number of ") + what + " blocks");
  for (const auto& v : vecs) {
    if (v.size() != 0 && v.size() != n)
      throw contract_error(std::string(what) + " block has wrong length");
  }
}

}  // namespace

void SystemDerivatives::validate() const {
  const std::size_t P = static_cast<std::size_t>(n_params);
  const std::size_t C = static_cast<std::size_t>(n_controls);
  check_block(dD_deps, P, n, "dD/deps");
  check_block(dD_dbeta, C, n, "dD/dbeta");
  check_block(d2D_deps2, P * P, n, "d2D/deps2");
  check_block(d2D_depsdbeta, P * C, n, "d2D/deps dbeta");
  check_block(d3D_depsdepsdbeta, P * P * C, n, "d3D/deps2 dbeta");
  check_vecs(dQ_deps, P, n, "dQ/deps");
  check_vecs(dQ_dbeta, C, n, "dQ/dbeta");
  check_vecs(d2Q_deps2, P * P, n, "d2Q/deps2");
  check_vecs(d2Q_depsdbeta, P * C, n, "d2Q/deps dbeta");
}

SolutionDerivatives solve_sensitivity_cascade(const SystemDerivatives& sd,
                                              const SaddleOperator& op,
                                              const Eigen::VectorXd& y) {
  sd.validate();
  if (y.size() != sd.n) throw contract_error("solution has the wrong length");
  const int n = sd.n;
  const int P = sd.n_params;
  const int C = sd.n_controls;
  const std::size_t Pz = static_cast<std::size_t>(P);
  const std::size_t Cz = static_cast<std::size_t>(C);

  SolutionDerivatives out;
  out.dy_deps.resize(n, P);
  out.dy_dbeta.resize(n, C);
  out.d2y_deps2.assign(Pz * Pz, Eigen::VectorXd());
  out.d2y_depsdbeta.assign(Pz * Cz, Eigen::VectorXd());
  out.d3y_depsdepsdbeta.assign(Pz * Pz * Cz, Eigen::VectorXd());

  // first order in the model parameters
  for (int a = 0; a < P; ++a) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    if (sd.dQ_deps[static_cast<std::size_t>(a)].size() != 0)
      rhs = sd.dQ_deps[static_cast<std::size_t>(a)];
    sub_mat_vec(rhs, sd.dD_deps[static_cast<std::size_t>(a)], y);
    out.dy_deps.col(a) = op.solve(rhs);
  }

  // first order in the controls
  for (int K = 0; K < C; ++K) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    if (sd.dQ_dbeta[static_cast<std::size_t>(K)].size() != 0)
      rhs = sd.dQ_dbeta[static_cast<std::size_t>(K)];
    sub_mat_vec(rhs, sd.dD_dbeta[static_cast<std::size_t>(K)], y);
    out.dy_dbeta.col(K) = op.solve(rhs);
  }

  // second order in the model parameters (symmetric in a <-> g)
  for (int a = 0; a < P; ++a) {
    for (int g = a; g < P; ++g) {
      const std::size_t ag = static_cast<std::size_t>(a) * Pz +
                             static_cast<std::size_t>(g);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
      if (sd.d2Q_deps2[ag].size() != 0) rhs = sd.d2Q_deps2[ag];
      sub_mat_vec(rhs, sd.d2D_deps2[ag], y);
      sub_mat_vec(rhs, sd.dD_deps[static_cast<std::size_t>(a)],
                  out.dy_deps.col(g));
      sub_mat_vec(rhs, sd.dD_deps[static_cast<std::size_t>(g)],
                  out.dy_deps.col(a));
      Eigen::VectorXd sol = op.solve(rhs);
      out.d2y_deps2[ag] = sol;
      out.d2y_deps2[static_cast<std::size_t>(g) * Pz +
                    static_cast<std::size_t>(a)] = std::move(sol);
    }
  }

  // mixed parameter-control second order
  for (int a = 0; a < P; ++a) {
    for (int K = 0; K < C; ++K) {
      const std::size_t aK = static_cast<std::size_t>(a) * Cz +
                             static_cast<std::size_t>(K);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
      if (sd.d2Q_depsdbeta[aK].size() != 0) rhs = sd.d2Q_depsdbeta[aK];
      sub_mat_vec(rhs, sd.d2D_depsdbeta[aK], y);
      sub_mat_vec(rhs, sd.dD_dbeta[static_cast<std::size_t>(K)],
                  out.dy_deps.col(a));
      sub_mat_vec(rhs, sd.dD_deps[static_cast<std::size_t>(a)],
                  out.dy_dbeta.col(K));
      out.d2y_depsdbeta[aK] = op.solve(rhs);
    }
  }

  // control derivative of the parameter Hessian (symmetric in a <-> g)
  for (int a = 0; a < P; ++a) {
    for (int g = a; g < P; ++g) {
      for (int K = 0; K < C; ++K) {
        const std::size_t ag = static_cast<std::size_t>(a) * Pz +
                               static_cast<std::size_t>(g);
        const std::size_t aK = static_cast<std::size_t>(a) * Cz +
                               static_cast<std::size_t>(K);
        const std::size_t gK = static_cast<std::size_t>(g) * Cz +
                               static_cast<std::size_t>(K);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        sub_mat_vec(rhs, sd.d3D_depsdepsdbeta[ag * Cz + static_cast<std::size_t>(K)], y);
        sub_mat_vec(rhs, sd.d2D_deps2[ag], out.dy_dbeta.col(K));
        sub_mat_vec(rhs, sd.d2D_depsdbeta[aK], out.dy_deps.col(g));
        sub_mat_vec(rhs, sd.dD_deps[static_cast<std::size_t>(a)],
                    out.d2y_depsdbeta[gK]);
        sub_mat_vec(rhs, sd.d2D_depsdbeta[gK], out.dy_deps.col(a));
        sub_mat_vec(rhs, sd.dD_deps[static_cast<std::size_t>(g)],
                    out.d2y_depsdbeta[aK]);
        sub_mat_vec(rhs, sd.dD_dbeta[static_cast<std::size_t>(K)],
                    out.d2y_deps2[ag]);
        Eigen::VectorXd sol = op.solve(rhs);
        out.d3y_depsdepsdbeta[ag * Cz + static_cast<std::size_t>(K)] = sol;
        out.d3y_depsdepsdbeta[(static_cast<std::size_t>(g) * Pz +
                               static_cast<std::size_t>(a)) *
                                  Cz +
                              static_cast<std::size_t>(K)] = std::move(sol);
      }
    }
  }
  return out;
}

double CascadeResiduals::max() const {
  return std::max({first_eps, first_beta, second_eps2, second_mixed, third});
}

namespace {

double relative_residual(const Eigen::VectorXd& residual, double scale) {
  return residual.cwiseAbs().maxCoeff() / std::max(scale, 1.0);
}

}  // namespace

CascadeResiduals cascade_residuals(const SystemDerivatives& sd,
                                   const Eigen::MatrixXd& D,
                                   const Eigen::VectorXd& y,
                                   const SolutionDerivatives& sol) {
  sd.validate();
  const int n = sd.n;
  const int P = sd.n_params;
  const int C = sd.n_controls;
  const std::size_t Pz = static_cast<std::size_t>(P);
  const std::size_t Cz = static_cast<std::size_t>(C);

  auto apply = [&](const Eigen::MatrixXd& A,
                   const Eigen::VectorXd& v) -> Eigen::VectorXd {
    if (A.size() == 0) return Eigen::VectorXd::Zero(n);
    return A * v;
  };
  auto maybe = [&](const std::vector<Eigen::VectorXd>& vs,
                   std::size_t i) -> Eigen::VectorXd {
    if (vs[i].size() == 0) return Eigen::VectorXd::Zero(n);
    return vs[i];
  };

  CascadeResiduals res;
  for (int a = 0; a < P; ++a) {
    const std::size_t az = static_cast<std::size_t>(a);
    Eigen::VectorXd r = apply(sd.dD_deps[az], y) + D * sol.dy_deps.col(a) -
                        maybe(sd.dQ_deps, az);
    const double scale = term_scale(sd.dD_deps[az], y) +
                         (D * sol.dy_deps.col(a)).cwiseAbs().maxCoeff();
    res.first_eps = std::max(res.first_eps, relative_residual(r, scale));
  }
  for (int K = 0; K < C; ++K) {
    const std::size_t Kz = static_cast<std::size_t>(K);
    Eigen::VectorXd r = apply(sd.dD_dbeta[Kz], y) + D * sol.dy_dbeta.col(K) -
                        maybe(sd.dQ_dbeta, Kz);
    const double scale = term_scale(sd.dD_dbeta[Kz], y) +
                         (D * sol.dy_dbeta.col(K)).cwiseAbs().maxCoeff();
    res.first_beta = std::max(res.first_beta, relative_residual(r, scale));
  }
  for (int a = 0; a < P; ++a) {
    for (int g = 0; g < P; ++g) {
      const std::size_t ag =
          static_cast<std::size_t>(a) * Pz + static_cast<std::size_t>(g);
      Eigen::VectorXd r = apply(sd.d2D_deps2[ag], y) +
                          apply(sd.dD_deps[static_cast<std::size_t>(a)],
                                sol.dy_deps.col(g)) +
                          apply(sd.dD_deps[static_cast<std::size_t>(g)],
                                sol.dy_deps.col(a)) +
                          D * sol.d2y_deps2[ag] - maybe(sd.d2Q_deps2, ag);
      const double scale = (D * sol.d2y_deps2[ag]).cwiseAbs().maxCoeff() +
                           term_scale(sd.dD_deps[static_cast<std::size_t>(a)],
                                      sol.dy_deps.col(g));
      res.second_eps2 = std::max(res.second_eps2, relative_residual(r, scale));
    }
  }
  for (int a = 0; a < P; ++a) {
    for (int K = 0; K < C; ++K) {
      const std::size_t aK =
          static_cast<std::size_t>(a) * Cz + static_cast<std::size_t>(K);
      Eigen::VectorXd r = apply(sd.d2D_depsdbeta[aK], y) +
                          apply(sd.dD_dbeta[static_cast<std::size_t>(K)],
                                sol.dy_deps.col(a)) +
                          apply(sd.dD_deps[static_cast<std::size_t>(a)],
                                sol.dy_dbeta.col(K)) +
                          D * sol.d2y_depsdbeta[aK] -
                          maybe(sd.d2Q_depsdbeta, aK);
      const double scale = (D * sol.d2y_depsdbeta[aK]).cwiseAbs().maxCoeff() +
                           term_scale(sd.dD_dbeta[static_cast<std::size_t>(K)],
                                      sol.dy_deps.col(a));
      res.second_mixed =
          std::max(res.second_mixed, relative_residual(r, scale));
    }
  }
  for (int a = 0; a < P; ++a) {
    for (int g = 0; g < P; ++g) {
      for (int K = 0; K < C; ++K) {
        const std::size_t ag =
            static_cast<std::size_t>(a) * Pz + static_cast<std::size_t>(g);
        const std::size_t aK =
            static_cast<std::size_t>(a) * Cz + static_cast<std::size_t>(K);
        const std::size_t gK =
            static_cast<std::size_t>(g) * Cz + static_cast<std::size_t>(K);
        const std::size_t agK = ag * Cz + static_cast<std::size_t>(K);
        Eigen::VectorXd r =
            apply(sd.d3D_depsdepsdbeta[agK], y) +
            apply(sd.d2D_deps2[ag], sol.dy_dbeta.col(K)) +
            apply(sd.d2D_depsdbeta[aK], sol.dy_deps.col(g)) +
            apply(sd.dD_deps[static_cast<std::size_t>(a)],
                  sol.d2y_depsdbeta[gK]) +
            apply(sd.d2D_depsdbeta[gK], sol.dy_deps.col(a)) +
            apply(sd.dD_deps[static_cast<std::size_t>(g)],
                  sol.d2y_depsdbeta[aK]) +
            apply(sd.dD_dbeta[static_cast<std::size_t>(K)],
                  sol.d2y_deps2[ag]) +
            D * sol.d3y_depsdepsdbeta[agK];
        const double scale =
            (D * sol.d3y_depsdepsdbeta[agK]).cwiseAbs().maxCoeff() +
            term_scale(sd.dD_dbeta[static_cast<std::size_t>(K)],
                       sol.d2y_deps2[ag]);
        res.third = std::max(res.third, relative_residual(r, scale));
      }
    }
  }
  return res;
}

SystemDerivatives build_saddle_derivatives(
    const AffineParameterizedSystem& system, const ExperimentDesign& design,
    const Eigen::VectorXd* nodal_data_source) {
  system.validate();
  design.validate_against(system.mesh);
  if (nodal_data_source &&
      nodal_data_source->size() != system.mesh.node_count())
    throw contract_error("nodal data source has the wrong length");

  const std::vector<int> free = system.free_dofs();
  const int nf = static_cast<int>(free.size());
  const int C = design.count();
  const int P = system.parameter_count();
  const int n = nf + C;
  const std::size_t Pz = static_cast<std::size_t>(P);
  const std::size_t Cz = static_cast<std::size_t>(C);

  SystemDerivatives sd;
  sd.n = n;
  sd.n_params = P;
  sd.n_controls = C;
  sd.dD_deps.assign(Pz, Eigen::MatrixXd());
  sd.dD_dbeta.assign(Cz, Eigen::MatrixXd());
  sd.d2D_deps2.assign(Pz * Pz, Eigen::MatrixXd());
  sd.d2D_depsdbeta.assign(Pz * Cz, Eigen::MatrixXd());
  sd.d3D_depsdepsdbeta.assign(Pz * Pz * Cz, Eigen::MatrixXd());
  sd.dQ_deps.assign(Pz, Eigen::VectorXd());
  sd.dQ_dbeta.assign(Cz, Eigen::VectorXd());
  sd.d2Q_deps2.assign(Pz * Pz, Eigen::VectorXd());
  sd.d2Q_depsdbeta.assign(Pz * Cz, Eigen::VectorXd());

  for (int a = 0; a < P; ++a) {
    const Eigen::MatrixXd& Ka = system.K_terms[static_cast<std::size_t>(a)];
    const Eigen::VectorXd& Fa = system.F_terms[static_cast<std::size_t>(a)];
    if (Ka.size() != 0) {
      Eigen::MatrixXd dD = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j)
          dD(i, j) = Ka(free[static_cast<std::size_t>(i)],
                        free[static_cast<std::size_t>(j)]);
      sd.dD_deps[static_cast<std::size_t>(a)] = std::move(dD);
    }
    Eigen::VectorXd dQ = Eigen::VectorXd::Zero(n);
    bool nonzero = false;
    if (Fa.size() != 0) {
      for (int i = 0; i < nf; ++i)
        dQ[i] = Fa[free[static_cast<std::size_t>(i)]];
      nonzero = true;
    }
    if (Ka.size() != 0) {
      for (const DirichletBc& bc : system.dirichlet) {
        if (bc.value == 0.0) continue;
        for (int i = 0; i < nf; ++i)
          dQ[i] -= Ka(free[static_cast<std::size_t>(i)], bc.dof) * bc.value;
        nonzero = true;
      }
    }
    if (nonzero) sd.dQ_deps[static_cast<std::size_t>(a)] = std::move(dQ);
  }

  for (int K = 0; K < C; ++K) {
    const Eigen::RowVectorXd drow = measurement_row_derivative(
        system.mesh, design.positions[static_cast<std::size_t>(K)]);
    Eigen::MatrixXd dD = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < nf; ++j) {
      const double v = drow[free[static_cast<std::size_t>(j)]];
      dD(j, nf + K) = -v;
      dD(nf + K, j) = -v;
    }
    sd.dD_dbeta[static_cast<std::size_t>(K)] = std::move(dD);

    if (nodal_data_source) {
      Eigen::VectorXd dQ = Eigen::VectorXd::Zero(n);
      dQ[nf + K] = -(drow * (*nodal_data_source))(0, 0);
      sd.dQ_dbeta[static_cast<std::size_t>(K)] = std::move(dQ);
    }
  }

  // affine operator and interpolatory data model: every remaining
  // derivative is structurally zero
  return sd;
}

ConstrainedDerivatives constrained_derivatives(
    const AffineParameterizedSystem& system, const Eigen::VectorXd& eps,
    const ExperimentDesign& design, const DataVector& data,
    const Eigen::VectorXd* nodal_data_source, bool with_beta_derivatives) {
  const SaddleOperator op(system, eps, design, data);
  const int nf = op.system().n_free;
  const int C = op.system().n_constraints;
  const int P = system.parameter_count();
  const std::size_t Pz = static_cast<std::size_t>(P);
  const std::size_t Cz = static_cast<std::size_t>(C);

  SystemDerivatives sd =
      build_saddle_derivatives(system, design, nodal_data_source);
  if (!with_beta_derivatives) {
    // drop the control blocks; the cascade then solves parameter items only
    sd.n_controls = 0;
    sd.dD_dbeta.clear();
    sd.dQ_dbeta.clear();
    sd.d2D_depsdbeta.clear();
    sd.d2Q_depsdbeta.clear();
    sd.d3D_depsdepsdbeta.clear();
  }

  const SolutionDerivatives sol =
      solve_sensitivity_cascade(sd, op, op.solution());

  ConstrainedDerivatives out;
  out.solution.theta = full_from_free(system, op.theta_free());
  out.solution.lambda = op.lambda();
  out.solution.objective = 0.5 * out.solution.lambda.squaredNorm();
  out.dlambda_deps = sol.dy_deps.bottomRows(C);
  out.d2lambda_deps2.resize(Pz * Pz);
  for (std::size_t i = 0; i < Pz * Pz; ++i)
    out.d2lambda_deps2[i] = sol.d2y_deps2[i].tail(C);

  if (with_beta_derivatives) {
    out.has_beta_derivatives = true;
    out.dlambda_dbeta = sol.dy_dbeta.bottomRows(C);
    out.d2lambda_depsdbeta.resize(Pz * Cz);
    for (std::size_t i = 0; i < Pz * Cz; ++i)
      out.d2lambda_depsdbeta[i] = sol.d2y_depsdbeta[i].tail(C);
    out.d3lambda_depsdepsdbeta.resize(Pz * Pz * Cz);
    for (std::size_t i = 0; i < Pz * Pz * Cz; ++i)
      out.d3lambda_depsdepsdbeta[i] = sol.d3y_depsdepsdbeta[i].tail(C);
  }
  (void)nf;
  return out;
}

Eigen::MatrixXd state_sensitivities(const AffineParameterizedSystem& system,
                                    const Eigen::VectorXd& eps,
                                    const ReducedSystem& reduced,
                                    const Eigen::VectorXd& theta_free) {
  const int P = system.parameter_count();
  const int nf = static_cast<int>(reduced.free_dofs.size());
  Eigen::MatrixXd dtheta(nf, P);
  for (int a = 0; a < P; ++a) {
    const Eigen::MatrixXd& Ka = system.K_terms[static_cast<std::size_t>(a)];
    const Eigen::VectorXd& Fa = system.F_terms[static_cast<std::size_t>(a)];
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    if (Fa.size() != 0) {
      for (int i = 0; i < nf; ++i)
        rhs[i] = Fa[reduced.free_dofs[static_cast<std::size_t>(i)]];
    }
    if (Ka.size() != 0) {
      Eigen::MatrixXd Ka_ff(nf, nf);
      for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j)
          Ka_ff(i, j) = Ka(reduced.free_dofs[static_cast<std::size_t>(i)],
                           reduced.free_dofs[static_cast<std::size_t>(j)]);
      rhs.noalias() -= Ka_ff * theta_free;
      for (const DirichletBc& bc : system.dirichlet) {
        if (bc.value == 0.0) continue;
        for (int i = 0; i < nf; ++i)
          rhs[i] -= Ka(reduced.free_dofs[static_cast<std::size_t>(i)], bc.dof) *
                    bc.value;
      }
    }
    dtheta.col(a) = reduced.llt.solve(rhs);
  }
  (void)eps;
  return dtheta;
}

Eigen::MatrixXd state_sensitivities(const AffineParameterizedSystem& system,
                                    const Eigen::VectorXd& eps) {
  const ReducedSystem rs = assemble(system, eps);
  const Eigen::VectorXd theta_free = rs.llt.solve(rs.F);
  return state_sensitivities(system, eps, rs, theta_free);
}

EigenPair min_eigenpair(const Eigen::MatrixXd& J) {
  if (J.rows() != J.cols() || J.rows() == 0)
    throw contract_error("eigen analysis needs a square nonempty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw error("symmetric eigendecomposition failed");
  EigenPair pair;
  pair.mu = es.eigenvalues()[0];
  pair.q = es.eigenvectors().col(0);
  pair.gap = J.rows() > 1 ? es.eigenvalues()[1] - es.eigenvalues()[0]
                          : std::numeric_limits<double>::infinity();
  return pair;
}

Eigen::VectorXd min_eigenvalue_gradient(
    const Eigen::MatrixXd& J, const std::vector<Eigen::MatrixXd>& dJ_dbeta,
    double relative_gap_tolerance) {
  const EigenPair pair = min_eigenpair(J);
  if (J.rows() > 1) {
    const double scale =
        std::max(1.0, J.cwiseAbs().maxCoeff());
    if (pair.gap / scale < relative_gap_tolerance)
      throw degenerate_eigenvalue_error(
          "minimum eigenvalue is (nearly) repeated; its gradient is not "
          "defined");
  }
  Eigen::VectorXd grad(static_cast<Eigen::Index>(dJ_dbeta.size()));
  for (std::size_t K = 0; K < dJ_dbeta.size(); ++K) {
    if (dJ_dbeta[K].rows() != J.rows() || dJ_dbeta[K].cols() != J.cols())
      throw contract_error("dJ/dbeta block has wrong dimensions");
    grad[static_cast<Eigen::Index>(K)] =
        pair.q.dot(dJ_dbeta[K] * pair.q);
  }
  return grad;
}

}  // namespace cfoed
