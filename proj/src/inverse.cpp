#include "cfoed/inverse.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "cfoed/errors.hpp"
#include "cfoed/sensitivity.hpp"

namespace cfoed {

namespace {

struct Evaluation {
  double f = std::numeric_limits<double>::infinity();
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  Eigen::VectorXd lambda;
};

using EvalFn = std::function<Evaluation(const Eigen::VectorXd&)>;

Eigen::VectorXd clamp_to(const std::vector<std::array<double, 2>>& box,
                         Eigen::VectorXd x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto& b = box[static_cast<std::size_t>(i)];
    x[i] = std::min(std::max(x[i], b[0]), b[1]);
  }
  return x;
}

Eigen::VectorXd projected_gradient(const std::vector<std::array<double, 2>>& box,
                                   const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& g) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto& b = box[static_cast<std::size_t>(i)];
    if (x[i] <= b[0] && g[i] > 0.0) pg[i] = 0.0;
    if (x[i] >= b[1] && g[i] < 0.0) pg[i] = 0.0;
  }
  return pg;
}

double objective_only(const EvalFn& eval, const Eigen::VectorXd& x) {
  try {
    return eval(x).f;
  } catch (const error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// derivative-free fallback for the scalar path
double golden_section_min(const EvalFn& eval, double lo, double hi) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective_only(eval, Eigen::VectorXd::Constant(1, c));
  double fd = objective_only(eval, Eigen::VectorXd::Constant(1, d));
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(b));
       ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective_only(eval, Eigen::VectorXd::Constant(1, c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective_only(eval, Eigen::VectorXd::Constant(1, d));
    }
  }
  return 0.5 * (a + b);
}

InverseResult minimize_box(const EvalFn& eval, Eigen::VectorXd eps,
                           const std::vector<std::array<double, 2>>& support,
                           const InverseOptions& options, const char* what) {
  if (support.size() != static_cast<std::size_t>(eps.size()))
    throw contract_error("support box must match the parameter count");
  for (const auto& b : support) {
    if (!(b[0] <= b[1])) throw domain_error("support bounds must satisfy lo <= hi");
  }
  eps = clamp_to(support, eps);
  const bool scalar = eps.size() == 1;

  double damping = 0.0;
  Evaluation cur = eval(eps);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::VectorXd pg = projected_gradient(support, eps, cur.g);
    if (pg.norm() < options.gradient_tolerance) {
      InverseResult res;
      res.eps = eps;
      res.objective = cur.f;
      res.iterations = it;
      res.lambda = cur.lambda;
      return res;
    }

    // Newton/Gauss-Newton step with damping fallback
    Eigen::VectorXd step;
    Eigen::MatrixXd H = cur.H;
    if (damping > 0.0)
      H += damping * Eigen::MatrixXd::Identity(eps.size(), eps.size());
    bool usable = true;
    if (scalar) {
      usable = H(0, 0) > 1e-14;
      if (usable) step = -cur.g / H(0, 0);
    } else {
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      usable = ldlt.info() == Eigen::Success && ldlt.isPositive();
      if (usable) step = -ldlt.solve(cur.g);
    }
    if (!usable) {
      const double scale = std::max(cur.g.norm(), 1e-8);
      step = -cur.g / scale;  // steepest descent with unit-ish length
    }

    const Eigen::VectorXd target = clamp_to(support, eps + step);
    const Eigen::VectorXd direction = target - eps;
    const double slope = cur.g.dot(direction);
    if (direction.norm() == 0.0 || slope >= 0.0) {
      if (scalar) {
        const double opt = golden_section_min(eval, support[0][0], support[0][1]);
        eps = Eigen::VectorXd::Constant(1, opt);
        cur = eval(eps);
        continue;
      }
      damping = damping == 0.0 ? 1e-6 : damping * 10.0;
      if (damping > 1e10)
        throw optimization_error(std::string(what) +
                                 ": no usable descent direction");
      continue;
    }

    double t = 1.0;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      const Eigen::VectorXd trial = clamp_to(support, eps + t * direction);
      Evaluation next;
      bool ok = true;
      try {
        next = eval(trial);
      } catch (const error&) {
        ok = false;
      }
      if (ok && next.f <= cur.f + 1e-4 * t * slope) {
        eps = trial;
        cur = next;
        accepted = true;
        damping *= 0.3;
        if (damping < 1e-12) damping = 0.0;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (scalar) {
        const double opt = golden_section_min(eval, support[0][0], support[0][1]);
        const Eigen::VectorXd trial = Eigen::VectorXd::Constant(1, opt);
        Evaluation next = eval(trial);
        if (next.f <= cur.f) {
          eps = trial;
          cur = next;
          continue;
        }
      }
      damping = damping == 0.0 ? 1e-6 : damping * 10.0;
      if (damping > 1e10) {
        std::ostringstream msg;
        msg << what << ": line search stalled at eps = [" << eps.transpose()
            << "], objective = " << cur.f
            << ", gradient norm = " << cur.g.norm();
        throw optimization_error(msg.str());
      }
    }
  }

  // converged-by-tolerance never hit: report the trace tail in the error
  std::ostringstream msg;
  msg << what << ": no convergence after " << options.max_iterations
      << " iterations; eps = [" << eps.transpose()
      << "], objective = " << cur.f << ", gradient norm = " << cur.g.norm();
  throw optimization_error(msg.str());
}

}  // namespace

InverseResult ecfm_inverse(const AffineParameterizedSystem& system,
                           const ExperimentDesign& design,
                           const DataVector& data, const Eigen::VectorXd& eps0,
                           const std::vector<std::array<double, 2>>& support,
                           const InverseOptions& options) {
  if (design.count() == 0)
    throw optimization_error(
        "ecfm inverse with zero measurements: objective is constant");
  const int P = system.parameter_count();
  const std::size_t Pz = static_cast<std::size_t>(P);
  const bool scalar = P == 1;

  const EvalFn eval = [&](const Eigen::VectorXd& eps) {
    const ConstrainedDerivatives cd = constrained_derivatives(
        system, eps, design, data, nullptr, false);
    Evaluation ev;
    ev.f = cd.solution.objective;
    ev.lambda = cd.solution.lambda;
    ev.g = cd.dlambda_deps.transpose() * cd.solution.lambda;
    ev.H = cd.dlambda_deps.transpose() * cd.dlambda_deps;
    if (scalar) {
      // full Newton for the scalar path; multi-parameter stays Gauss-Newton
      for (int a = 0; a < P; ++a)
        for (int g = 0; g < P; ++g)
          ev.H(a, g) += cd.solution.lambda.dot(
              cd.d2lambda_deps2[static_cast<std::size_t>(a) * Pz +
                                static_cast<std::size_t>(g)]);
    }
    return ev;
  };
  return minimize_box(eval, eps0, support, options, "ecfm_inverse");
}

InverseResult standard_inverse(
    const AffineParameterizedSystem& system, const ExperimentDesign& design,
    const DataVector& data, const Eigen::VectorXd& eps0,
    const std::vector<std::array<double, 2>>& support,
    const InverseOptions& options) {
  if (design.count() == 0)
    throw optimization_error(
        "standard inverse with zero measurements: objective is constant");
  if (data.count() != design.count())
    throw contract_error("data length must match the number of measurements");

  const MeasurementOperator M = measurement_operator(design, system.mesh);
  const std::vector<int> free = system.free_dofs();
  Eigen::MatrixXd Mf(design.count(), static_cast<Eigen::Index>(free.size()));
  for (std::size_t j = 0; j < free.size(); ++j)
    Mf.col(static_cast<Eigen::Index>(j)) = M.rows.col(free[j]);
  Eigen::VectorXd v = data.values;
  for (const DirichletBc& bc : system.dirichlet) {
    if (bc.value != 0.0) v -= M.rows.col(bc.dof) * bc.value;
  }

  const EvalFn eval = [&](const Eigen::VectorXd& eps) {
    const ReducedSystem rs = assemble(system, eps);
    const Eigen::VectorXd theta_free = rs.llt.solve(rs.F);
    const Eigen::MatrixXd dtheta =
        state_sensitivities(system, eps, rs, theta_free);
    const Eigen::VectorXd residual = Mf * theta_free - v;
    const Eigen::MatrixXd S = Mf * dtheta;
    Evaluation ev;
    ev.f = 0.5 * residual.squaredNorm();
    ev.g = S.transpose() * residual;
    ev.H = S.transpose() * S;
    return ev;
  };
  return minimize_box(eval, eps0, support, options, "standard_inverse");
}

}  // namespace cfoed
