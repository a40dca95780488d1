#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace cfoed {

/// Prior over the model parameters; independent marginals per parameter.
struct PriorSpec {
  enum class Kind { Uniform, Gaussian, Point };

  struct Marginal {
    Kind kind = Kind::Point;
    double a = 0.0;  // uniform: lower; gaussian: mean; point: value
    double b = 0.0;  // uniform: upper; gaussian: stddev; point: unused
  };

  std::vector<Marginal> marginals;

  static PriorSpec uniform(double lo, double hi);
  static PriorSpec gaussian(double mean, double stddev);
  static PriorSpec point(double value);

  /// Append another independent marginal (multi-parameter priors).
  PriorSpec& and_uniform(double lo, double hi);
  PriorSpec& and_gaussian(double mean, double stddev);
  PriorSpec& and_point(double value);

  int dimension() const { return static_cast<int>(marginals.size()); }
  Eigen::VectorXd mean() const;
  void validate() const;
};

/// n-point rules on the reference interval: Legendre on [-1,1] with weight 1,
/// Hermite with weight exp(-x^2). Nodes ascending.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre_rule(int n);
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_rule(int n);

/// Tensor-product rule approximating expectations over the prior:
/// E[f] = sum_q weights[q] * f(nodes.row(q)). Weights are normalized to
/// sum to one. A point-mass marginal contributes a single node regardless
/// of points_per_dimension.
struct QuadratureRule {
  Eigen::MatrixXd nodes;    // Q x P
  Eigen::VectorXd weights;  // Q

  int point_count() const { return static_cast<int>(weights.size()); }
  int dimension() const { return static_cast<int>(nodes.cols()); }

  static QuadratureRule for_prior(const PriorSpec& prior,
                                  int points_per_dimension);
  void validate() const;

  template <typename F>
  double expectation(F&& f) const {
    double acc = 0.0;
    for (int q = 0; q < point_count(); ++q) {
      acc += weights[q] * f(Eigen::VectorXd(nodes.row(q)));
    }
    return acc;
  }
};

}  // namespace cfoed
