#include "gwpt/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace gwpt {

namespace {

// Below this |s| the remainders are summed as alternating series; the direct
// differences would lose up to |s|^-4 in relative accuracy.
constexpr double kSeriesSwitch = 1.0;

// sum_{k >= k0} (-1)^k s^(2k + odd) / (2k + odd)!
double alternating_tail(double s, int k0, int odd)
{
  const double s2 = s * s;
  double term = 1.0;
  for (int m = 1; m <= 2 * k0 + odd; ++m) term *= s / m;
  if (k0 % 2) term = -term;
  double sum = 0.0;
  for (int k = k0; k < k0 + 30; ++k) {
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    const int m = 2 * k + odd;
    term *= -s2 / ((m + 1.0) * (m + 2.0));
  }
  return sum;
}

}  // namespace

double rem_cos(double s)
{
  if (std::abs(s) < kSeriesSwitch) return alternating_tail(s, 2, 0);
  return std::cos(s) - 1.0 + 0.5 * s * s;
}

double rem_sin(double s)
{
  if (std::abs(s) < kSeriesSwitch) return alternating_tail(s, 1, 1);
  return std::sin(s) - s;
}

double naive_taylor_remainder2(const Potential& V, const Vec& q, const Vec& s)
{
  const Vec qs = q + s;
  return V.value(qs) - V.value(q) - V.gradient(q).dot(s) - 0.5 * s.dot(V.hessian(q) * s);
}

double taylor_remainder2(const Potential& V, const Vec& q, const Vec& s)
{
  if (V.remainder2) return V.remainder2(q, s);
  return naive_taylor_remainder2(V, q, s);
}

namespace potentials {

namespace {

// Sum over coordinates of (1 - cos x_j): remainder per axis is
// -cos(q) rem_cos(s) + sin(q) rem_sin(s).
Potential separable_cosine(int dim, std::string name)
{
  Potential V;
  V.name = std::move(name);
  V.dim = dim;
  V.value = [](const Vec& x) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) v += 1.0 - std::cos(x[j]);
    return v;
  };
  V.gradient = [](const Vec& x) {
    Vec g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) g[j] = std::sin(x[j]);
    return g;
  };
  V.hessian = [](const Vec& x) {
    Mat h = Mat::Zero(x.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) h(j, j) = std::cos(x[j]);
    return h;
  };
  V.remainder2 = [](const Vec& q, const Vec& s) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      r += -std::cos(q[j]) * rem_cos(s[j]) + std::sin(q[j]) * rem_sin(s[j]);
    }
    return r;
  };
  return V;
}

double horner(const std::vector<double>& c, double x)
{
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

}  // namespace

Potential cosine1d() { return separable_cosine(1, "cosine1d"); }

Potential cosine2d() { return separable_cosine(2, "cosine2d"); }

Potential harmonic(int dim)
{
  if (dim < 1) throw std::invalid_argument("harmonic: dim must be >= 1");
  Potential V;
  V.name = dim == 1 ? "harmonic" : "harmonic" + std::to_string(dim) + "d";
  V.dim = dim;
  V.value = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  V.gradient = [](const Vec& x) { return Vec(x); };
  V.hessian = [](const Vec& x) { return Mat(Mat::Identity(x.size(), x.size())); };
  V.remainder2 = [](const Vec&, const Vec&) { return 0.0; };
  return V;
}

Potential polynomial(std::vector<double> coeffs, int dim)
{
  if (coeffs.empty()) coeffs.push_back(0.0);
  if (coeffs.size() > 9) {
    throw std::invalid_argument("polynomial potential: degree " + std::to_string(coeffs.size() - 1) +
                                " exceeds the supported maximum of 8");
  }
  if (dim < 1) throw std::invalid_argument("polynomial: dim must be >= 1");

  // Derivative coefficient tables: derivs[m] holds the coefficients of p^(m).
  std::vector<std::vector<double>> derivs{coeffs};
  while (derivs.back().size() > 1) {
    const auto& prev = derivs.back();
    std::vector<double> next(prev.size() - 1);
    for (std::size_t i = 1; i < prev.size(); ++i) next[i - 1] = prev[i] * static_cast<double>(i);
    derivs.push_back(std::move(next));
  }

  Potential V;
  V.name = "polynomial";
  V.dim = dim;
  V.value = [derivs](const Vec& x) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) v += horner(derivs[0], x[j]);
    return v;
  };
  V.gradient = [derivs](const Vec& x) {
    Vec g = Vec::Zero(x.size());
    if (derivs.size() > 1)
      for (Eigen::Index j = 0; j < x.size(); ++j) g[j] = horner(derivs[1], x[j]);
    return g;
  };
  V.hessian = [derivs](const Vec& x) {
    Mat h = Mat::Zero(x.size(), x.size());
    if (derivs.size() > 2)
      for (Eigen::Index j = 0; j < x.size(); ++j) h(j, j) = horner(derivs[2], x[j]);
    return h;
  };
  // Exact Taylor tail: sum_{m>=3} p^(m)(q) s^m / m!.
  V.remainder2 = [derivs](const Vec& q, const Vec& s) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      double factorial = 2.0;
      double power = s[j] * s[j];
      for (std::size_t m = 3; m < derivs.size(); ++m) {
        factorial *= static_cast<double>(m);
        power *= s[j];
        r += horner(derivs[m], q[j]) * power / factorial;
      }
    }
    return r;
  };
  return V;
}

Potential by_name(const std::string& name)
{
  if (name == "cosine1d") return cosine1d();
  if (name == "cosine2d") return cosine2d();
  if (name == "harmonic") return harmonic(1);
  if (name == "harmonic2d") return harmonic(2);
  throw std::invalid_argument("unknown potential '" + name + "'");
}

}  // namespace potentials

}  // namespace gwpt
