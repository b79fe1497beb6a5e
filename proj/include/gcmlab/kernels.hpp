#pragma once

#include <string>
#include <vector>

namespace gcmlab {

//! Symmetric polynomial density kernel on [-1, 1].
//!
//! Everything downstream (Gasser-Muller integrals, primitive K, second
//! primitive, moments) is exact polynomial arithmetic, so the smoothers have
//! no quadrature error.
class KernelSpec {
public:
  //! coeffs[j] multiplies u^j; the polynomial must be a symmetric density:
  //! k >= 0 on [-1,1], integral 1, first moment 0.
  explicit KernelSpec(std::vector<double> coeffs, std::string name = "custom");

  static KernelSpec epanechnikov();  // 3/4 (1 - u^2)
  static KernelSpec triweight();     // 35/32 (1 - u^2)^3
  static KernelSpec by_name(const std::string& name);

  const std::string& name() const { return name_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  double k(double u) const;        // density, 0 outside [-1,1]
  double k_prime(double u) const;  // derivative inside (-1,1), 0 outside
  double K(double t) const;        // primitive, 0 below -1 and 1 above 1

  //! Second primitive K2(t) = int_{-1}^{t} K; grows as K2(1) + (t-1) past 1.
  double K2(double t) const;

  //! Partial moments over [-1, min(t,1)]: M0 = int k, M1 = int u k(u) du.
  double M0(double t) const { return K(t); }
  double M1(double t) const;

  double second_moment() const;  // int u^2 k(u) du
  double l2_norm_sq() const;     // int k(u)^2 du

private:
  std::vector<double> coeffs_;
  std::vector<double> anti_;      // antiderivative of k, zero constant
  std::vector<double> anti2_;     // antiderivative of K(t) - built in ctor
  std::vector<double> u_anti_;    // antiderivative of u*k(u)
  std::string name_;
};

}  // namespace gcmlab
