#include "gcmlab/hermite.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gcmlab/grid_function.hpp"

namespace gcmlab {

double hermite_poly(int k, double x) {
  detail::require(k >= 0, "hermite_poly: negative order");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - double(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// Golub-Welsch on the Jacobi matrix of the orthonormal probabilists'
// Hermite recurrence (off-diagonal sqrt(k), total weight 1).
QuadratureRule build_gauss_hermite(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(double(k));
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

QuadratureRule build_gauss_legendre(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = double(k) / std::sqrt(4.0 * double(k) * double(k) - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

const QuadratureRule& gauss_legendre_rule(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

double phi(double x) {
  return std::exp(-0.5 * x * x) / 2.5066282746310005024;
}

// int_0^38 f(x) phi(x) dx over unit panels (the upper Gaussian tail past 38
// is below double underflow).
double positive_half_integral(const std::function<double(double)>& f,
                              int nodes_per_panel) {
  const QuadratureRule& gl = gauss_legendre_rule(nodes_per_panel);
  double acc = 0.0;
  for (int panel = 0; panel < 38; ++panel) {
    const double a = double(panel), b = double(panel + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
      s += gl.weights[i] * f(x) * phi(x);
    }
    acc += 0.5 * (b - a) * s;
  }
  return acc;
}

double gh_integral(const Subordination& g, int k, int n_nodes) {
  const QuadratureRule& rule = gauss_hermite_rule(n_nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    acc += rule.weights[i] * g(x) * hermite_poly(k, x);
  }
  return acc;
}

}  // namespace

const QuadratureRule& gauss_hermite_rule(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_hermite(n)).first;
  return it->second;
}

Subordination Subordination::by_name(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "square" || name == "square_minus_one") return square_minus_one();
  if (name == "sign") return sign();
  throw std::invalid_argument("Subordination: unknown descriptor '" + name + "'");
}

double Subordination::operator()(double x) const {
  switch (kind) {
    case Kind::identity:
      return x;
    case Kind::square_minus_one:
      return x * x - 1.0;
    case Kind::sign:
      return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    case Kind::polynomial: {
      double v = 0.0;
      for (std::size_t j = poly_coeffs.size(); j-- > 0;)
        v = v * x + poly_coeffs[j];
      return v;
    }
  }
  return 0.0;
}

double hermite_coeff(const Subordination& g, int k) {
  detail::require(k >= 0, "hermite_coeff: negative order");
  if (g.kind == Subordination::Kind::sign) {
    // sign * h_k is even for odd k; split at the kink and integrate the
    // smooth halves (composite Gauss-Legendre, 32- vs 48-node check).
    if (k % 2 == 0) return 0.0;
    auto f = [k](double x) { return hermite_poly(k, x); };
    const double a = 2.0 * positive_half_integral(f, 32);
    const double b = 2.0 * positive_half_integral(f, 48);
    if (std::abs(a - b) > 1e-10)
      throw std::runtime_error("hermite_coeff: quadrature did not converge");
    return b;
  }
  const double a = gh_integral(g, k, 128);
  const double b = gh_integral(g, k, 256);
  if (std::abs(a - b) > 1e-10)
    throw std::runtime_error("hermite_coeff: quadrature did not converge");
  return b;
}

int hermite_rank(const Subordination& g, double tol) {
  for (int k = 1; k <= 16; ++k) {
    if (std::abs(hermite_coeff(g, k)) > tol) return k;
  }
  throw std::runtime_error("hermite_rank: no nonzero coefficient up to k = 16");
}

std::vector<double> hermite_coeffs(const Subordination& g, int kmax) {
  std::vector<double> out(kmax + 1);
  for (int k = 0; k <= kmax; ++k) out[k] = hermite_coeff(g, k);
  return out;
}

}  // namespace gcmlab
