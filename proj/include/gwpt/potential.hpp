#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gwpt/types.hpp"

namespace gwpt {

/// Analytic scalar potential V: R^d -> R with first and second derivatives.
///
/// `remainder2`, when set, evaluates V(q+s) - V(q) - grad V(q).s - s^T Hess V(q) s / 2
/// without forming the cancelling difference. The residue potential of the
/// rescaled equation is built from this quantity at |s| = O(sqrt(eps)), where the
/// naive difference loses most of its digits.
struct Potential {
  std::string name;
  int dim = 1;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
  std::function<double(const Vec& q, const Vec& s)> remainder2;
};

/// Second order Taylor remainder of V about q, evaluated at q+s.
double taylor_remainder2(const Potential& V, const Vec& q, const Vec& s);

/// The same remainder by direct subtraction; never uses `remainder2`.
double naive_taylor_remainder2(const Potential& V, const Vec& q, const Vec& s);

/// cos(s) - 1 + s^2/2, by truncated series for |s| < 1e-2.
double rem_cos(double s);

/// sin(s) - s, by truncated series for |s| < 1e-2.
double rem_sin(double s);

namespace potentials {

/// V(x) = 1 - cos(x), d = 1.
Potential cosine1d();

/// V(x, y) = 2 - cos(x) - cos(y), d = 2.
Potential cosine2d();

/// V(x) = |x|^2 / 2 in d dimensions.
Potential harmonic(int dim);

/// Separable polynomial V(x) = sum_j sum_m coeffs[m] x_j^m. Degree is capped at 8.
Potential polynomial(std::vector<double> coeffs, int dim = 1);

/// Lookup by preset name: "cosine1d", "cosine2d", "harmonic" (d=1), "harmonic2d".
Potential by_name(const std::string& name);

}  // namespace potentials

}  // namespace gwpt
