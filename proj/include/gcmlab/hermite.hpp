#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gcmlab {

//! Probabilists' Hermite polynomial h_k(x) by the three-term recurrence;
//! h_0 = 1, h_1 = x, h_2 = x^2 - 1, and E[h_j h_k] = k! delta_jk under the
//! standard Gaussian.
double hermite_poly(int k, double x);

//! Gauss-Hermite rule for the standard Gaussian weight: sum w_i f(x_i)
//! integrates polynomials of degree <= 2n-1 against phi exactly.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const QuadratureRule& gauss_hermite_rule(int n);

//! Subordinating function for a Gaussian sequence: eps_i = g(xi_i).
struct Subordination {
  enum class Kind { identity, square_minus_one, sign, polynomial };

  Kind kind = Kind::identity;
  std::vector<double> poly_coeffs;  // for Kind::polynomial

  static Subordination identity() { return {Kind::identity, {}}; }
  static Subordination square_minus_one() { return {Kind::square_minus_one, {}}; }
  static Subordination sign() { return {Kind::sign, {}}; }
  static Subordination polynomial(std::vector<double> coeffs) {
    return {Kind::polynomial, std::move(coeffs)};
  }
  static Subordination by_name(const std::string& name);

  double operator()(double x) const;
};

//! L2(phi)-projection eta_k = E[g(xi) h_k(xi)].
//!
//! Smooth descriptors use a 128-node Gauss-Hermite rule with a 256-node
//! agreement check (absolute 1e-10, throws on disagreement); the sign
//! descriptor splits at its kink and uses panelled Gauss-Legendre instead.
double hermite_coeff(const Subordination& g, int k);

//! Hermite rank: the smallest k >= 1 with eta_k != 0 (scans up to k = 16).
int hermite_rank(const Subordination& g, double tol = 1e-9);

//! All coefficients eta_0 .. eta_kmax in one pass.
std::vector<double> hermite_coeffs(const Subordination& g, int kmax);

}  // namespace gcmlab
