#include "gcmlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gcmlab/grid_function.hpp"

namespace gcmlab {

namespace {

double poly_eval(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) v = v * u + c[j];
  return v;
}

std::vector<double> poly_antiderivative(const std::vector<double>& c) {
  std::vector<double> a(c.size() + 1, 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) a[j + 1] = c[j] / double(j + 1);
  return a;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = c[j] * double(j);
  return d;
}

// int_{-1}^{1} of the polynomial with coefficients c
double poly_mass(const std::vector<double>& c) {
  const auto a = poly_antiderivative(c);
  return poly_eval(a, 1.0) - poly_eval(a, -1.0);
}

std::vector<double> poly_mul_u(const std::vector<double>& c, int power) {
  std::vector<double> r(c.size() + power, 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) r[j + power] = c[j];
  return r;
}

std::vector<double> poly_square(const std::vector<double>& c) {
  std::vector<double> r(2 * c.size() - 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) r[i + j] += c[i] * c[j];
  return r;
}

}  // namespace

KernelSpec::KernelSpec(std::vector<double> coeffs, std::string name)
    : coeffs_(std::move(coeffs)), name_(std::move(name)) {
  detail::require(!coeffs_.empty(), "KernelSpec: empty coefficient vector");
  const double mass = poly_mass(coeffs_);
  detail::require(std::abs(mass - 1.0) <= 1e-10,
                  "KernelSpec: kernel does not integrate to 1");
  const double m1 = poly_mass(poly_mul_u(coeffs_, 1));
  detail::require(std::abs(m1) <= 1e-10,
                  "KernelSpec: kernel has nonzero first moment");
  for (int i = 0; i <= 400; ++i) {
    const double u = -1.0 + 2.0 * i / 400.0;
    detail::require(poly_eval(coeffs_, u) >= -1e-10,
                    "KernelSpec: kernel negative on [-1,1]");
  }
  anti_ = poly_antiderivative(coeffs_);
  u_anti_ = poly_antiderivative(poly_mul_u(coeffs_, 1));
  // antiderivative of K(t) = anti(t) - anti(-1): integrate and fold in the
  // constant so that K2(-1) = 0.
  anti2_ = poly_antiderivative(anti_);
  const double c0 = poly_eval(anti_, -1.0);
  anti2_[1] -= c0;
}

KernelSpec KernelSpec::epanechnikov() {
  return KernelSpec({0.75, 0.0, -0.75}, "epanechnikov");
}

KernelSpec KernelSpec::triweight() {
  const double a = 35.0 / 32.0;
  return KernelSpec({a, 0.0, -3.0 * a, 0.0, 3.0 * a, 0.0, -a}, "triweight");
}

KernelSpec KernelSpec::by_name(const std::string& name) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "triweight") return triweight();
  throw std::invalid_argument("KernelSpec: unknown kernel '" + name + "'");
}

double KernelSpec::k(double u) const {
  if (u < -1.0 || u > 1.0) return 0.0;
  return poly_eval(coeffs_, u);
}

double KernelSpec::k_prime(double u) const {
  if (u < -1.0 || u > 1.0) return 0.0;
  return poly_eval(poly_derivative(coeffs_), u);
}

double KernelSpec::K(double t) const {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return poly_eval(anti_, t) - poly_eval(anti_, -1.0);
}

double KernelSpec::K2(double t) const {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0)
    return poly_eval(anti2_, 1.0) - poly_eval(anti2_, -1.0) + (t - 1.0);
  return poly_eval(anti2_, t) - poly_eval(anti2_, -1.0);
}

double KernelSpec::M1(double t) const {
  if (t <= -1.0) return 0.0;
  const double u = std::min(t, 1.0);
  return poly_eval(u_anti_, u) - poly_eval(u_anti_, -1.0);
}

double KernelSpec::second_moment() const {
  return poly_mass(poly_mul_u(coeffs_, 2));
}

double KernelSpec::l2_norm_sq() const { return poly_mass(poly_square(coeffs_)); }

}  // namespace gcmlab
