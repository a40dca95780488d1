#pragma once

#include <Eigen/Core>
#include <functional>

namespace cfoed {

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian of f at x; per-component step
/// step * max(1, |x_i|).
Eigen::MatrixXd central_difference_jacobian(const VectorFn& f,
                                            const Eigen::VectorXd& x,
                                            double step = 1e-5);

/// Verification harness for derivative claims: compares a claimed Jacobian
/// against central differences of f.
struct FdReport {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  int worst_row = -1;
  int worst_col = -1;
  Eigen::MatrixXd fd;
};

FdReport finite_difference_check(const VectorFn& f,
                                 const Eigen::MatrixXd& claimed_jacobian,
                                 const Eigen::VectorXd& point,
                                 double step = 1e-5);

/// Relative difference between two derivative blocks:
/// |a - b|_inf / max(|a|_inf, |b|_inf, floor). The unit floor makes the
/// measure absolute for blocks that are structurally zero.
double relative_block_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            double floor = 1.0);

}  // namespace cfoed
