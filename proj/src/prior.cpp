#include "cfoed/prior.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "cfoed/errors.hpp"

namespace cfoed {

PriorSpec PriorSpec::uniform(double lo, double hi) {
  PriorSpec p;
  p.and_uniform(lo, hi);
  return p;
}

PriorSpec PriorSpec::gaussian(double mean, double stddev) {
  PriorSpec p;
  p.and_gaussian(mean, stddev);
  return p;
}

PriorSpec PriorSpec::point(double value) {
  PriorSpec p;
  p.and_point(value);
  return p;
}

PriorSpec& PriorSpec::and_uniform(double lo, double hi) {
  marginals.push_back({Kind::Uniform, lo, hi});
  return *this;
}

PriorSpec& PriorSpec::and_gaussian(double mean, double stddev) {
  marginals.push_back({Kind::Gaussian, mean, stddev});
  return *this;
}

PriorSpec& PriorSpec::and_point(double value) {
  marginals.push_back({Kind::Point, value, 0.0});
  return *this;
}

Eigen::VectorXd PriorSpec::mean() const {
  Eigen::VectorXd m(dimension());
  for (int i = 0; i < dimension(); ++i) {
    const Marginal& mg = marginals[static_cast<std::size_t>(i)];
    m[i] = mg.kind == Kind::Uniform ? 0.5 * (mg.a + mg.b) : mg.a;
  }
  return m;
}

void PriorSpec::validate() const {
  if (marginals.empty()) throw domain_error("prior has no marginals");
  for (const Marginal& m : marginals) {
    switch (m.kind) {
      case Kind::Uniform:
        if (!(m.a < m.b)) throw domain_error("uniform prior requires lo < hi");
        break;
      case Kind::Gaussian:
        if (!(m.b > 0.0))
          throw domain_error("gaussian prior requires stddev > 0");
        break;
      case Kind::Point:
        break;
    }
  }
}

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// orthogonal-polynomial recurrence, weights come from the first eigenvector
// components scaled by the total weight-function mass.
std::pair<Eigen::VectorXd, Eigen::VectorXd> golub_welsch(
    const Eigen::VectorXd& offdiag, double total_mass) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) T(i, i - 1) = T(i - 1, i) = offdiag[i - 1];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Eigen::VectorXd nodes = es.eigenvalues();
  Eigen::VectorXd weights(n);
  for (int i = 0; i < n; ++i) {
    const double q0 = es.eigenvectors()(0, i);
    weights[i] = total_mass * q0 * q0;
  }
  return {nodes, weights};
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre_rule(int n) {
  if (n < 1) throw domain_error("quadrature order must be >= 1");
  Eigen::VectorXd off(n - 1);
  for (int i = 1; i < n; ++i)
    off[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
  return golub_welsch(off, 2.0);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_rule(int n) {
  if (n < 1) throw domain_error("quadrature order must be >= 1");
  Eigen::VectorXd off(n - 1);
  for (int i = 1; i < n; ++i) off[i - 1] = std::sqrt(0.5 * i);
  return golub_welsch(off, std::sqrt(M_PI));
}

QuadratureRule QuadratureRule::for_prior(const PriorSpec& prior,
                                         int points_per_dimension) {
  prior.validate();
  if (points_per_dimension < 1)
    throw domain_error("quadrature needs at least one point per dimension");

  // per-marginal 1D rules, already normalized against the prior density
  std::vector<Eigen::VectorXd> dim_nodes, dim_weights;
  for (const PriorSpec::Marginal& m : prior.marginals) {
    Eigen::VectorXd x, w;
    switch (m.kind) {
      case PriorSpec::Kind::Uniform: {
        auto [t, wt] = gauss_legendre_rule(points_per_dimension);
        const double mid = 0.5 * (m.a + m.b);
        const double half = 0.5 * (m.b - m.a);
        x = (mid + (half * t.array())).matrix();
        w = 0.5 * wt;
        break;
      }
      case PriorSpec::Kind::Gaussian: {
        auto [t, wt] = gauss_hermite_rule(points_per_dimension);
        x = (m.a + (std::sqrt(2.0) * m.b * t.array())).matrix();
        w = wt / std::sqrt(M_PI);
        break;
      }
      case PriorSpec::Kind::Point: {
        x = Eigen::VectorXd::Constant(1, m.a);
        w = Eigen::VectorXd::Constant(1, 1.0);
        break;
      }
    }
    dim_nodes.push_back(std::move(x));
    dim_weights.push_back(std::move(w));
  }

  const int dims = prior.dimension();
  int total = 1;
  for (const auto& x : dim_nodes) total *= static_cast<int>(x.size());

  QuadratureRule rule;
  rule.nodes.resize(total, dims);
  rule.weights.resize(total);
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  for (int q = 0; q < total; ++q) {
    double w = 1.0;
    for (int d = 0; d < dims; ++d) {
      rule.nodes(q, d) = dim_nodes[static_cast<std::size_t>(d)][idx[static_cast<std::size_t>(d)]];
      w *= dim_weights[static_cast<std::size_t>(d)][idx[static_cast<std::size_t>(d)]];
    }
    rule.weights[q] = w;
    for (int d = dims - 1; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] <
          static_cast<int>(dim_nodes[static_cast<std::size_t>(d)].size()))
        break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
  }
  rule.validate();
  return rule;
}

void QuadratureRule::validate() const {
  if (weights.size() == 0) throw domain_error("empty quadrature rule");
  if (nodes.rows() != weights.size())
    throw contract_error("quadrature nodes/weights size mismatch");
  for (int q = 0; q < point_count(); ++q) {
    if (!(weights[q] > 0.0))
      throw domain_error("quadrature weights must be positive");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw domain_error("quadrature weights must sum to the prior mass (1)");
}

}  // namespace cfoed
