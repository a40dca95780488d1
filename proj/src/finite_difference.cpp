#include "cfoed/finite_difference.hpp"

#include <cmath>

#include "cfoed/errors.hpp"

namespace cfoed {

Eigen::MatrixXd central_difference_jacobian(const VectorFn& f,
                                            const Eigen::VectorXd& x,
                                            double step) {
  if (!(step > 0.0)) throw domain_error("finite-difference step must be > 0");
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

FdReport finite_difference_check(const VectorFn& f,
                                 const Eigen::MatrixXd& claimed_jacobian,
                                 const Eigen::VectorXd& point, double step) {
  FdReport report;
  report.fd = central_difference_jacobian(f, point, step);
  if (report.fd.rows() != claimed_jacobian.rows() ||
      report.fd.cols() != claimed_jacobian.cols())
    throw contract_error("claimed Jacobian has the wrong shape");
  for (Eigen::Index i = 0; i < report.fd.rows(); ++i) {
    for (Eigen::Index j = 0; j < report.fd.cols(); ++j) {
      const double a = claimed_jacobian(i, j);
      const double d = report.fd(i, j);
      const double abs_err = std::abs(a - d);
      const double rel_err =
          abs_err / std::max({std::abs(a), std::abs(d), 1e-6});
      if (abs_err > report.max_abs_error) report.max_abs_error = abs_err;
      if (rel_err > report.max_rel_error) {
        report.max_rel_error = rel_err;
        report.worst_row = static_cast<int>(i);
        report.worst_col = static_cast<int>(j);
      }
    }
  }
  return report;
}

double relative_block_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw contract_error("blocks have different shapes");
  const double scale = std::max(
      {a.size() ? a.cwiseAbs().maxCoeff() : 0.0,
       b.size() ? b.cwiseAbs().maxCoeff() : 0.0, floor});
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace cfoed
