#include "gwpt/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace gwpt {

Vec orthonormal_hermite(int n, double x)
{
  Vec p(n + 1);
  p[0] = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  if (n >= 1) p[1] = std::sqrt(2.0) * x * p[0];
  for (int k = 1; k < n; ++k) {
    p[k + 1] = (x * p[k] - std::sqrt(0.5 * k) * p[k - 1]) / std::sqrt(0.5 * (k + 1));
  }
  return p;
}

QuadratureRule gauss_hermite_1d(int n)
{
  if (n < 1 || n > 200) {
    throw std::invalid_argument("gauss_hermite_1d: N must lie in [1, 200], got " +
                                std::to_string(n));
  }

  // Jacobi matrix of the monic Hermite recurrence: zero diagonal,
  // off-diagonal sqrt(k/2).
  Vec diag = Vec::Zero(n);
  Vec sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);

  Eigen::SelfAdjointEigenSolver<Mat> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  Vec x = eig.eigenvalues();

  // Newton polish on p_n, with p_n' = sqrt(2n) p_{n-1}.
  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 3; ++it) {
      const Vec p = orthonormal_hermite(n, x[i]);
      const double dp = std::sqrt(2.0 * n) * p[n - 1];
      if (dp == 0.0) break;
      const double step = p[n] / dp;
      x[i] -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x[i]))) break;
    }
  }

  Vec w(n);
  for (int i = 0; i < n; ++i) {
    const Vec p = orthonormal_hermite(n - 1, x[i]);
    w[i] = 1.0 / p.squaredNorm();
  }

  QuadratureRule rule;
  rule.dim = 1;
  rule.nodes.resize(1, n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const int mirror = n - 1 - i;
    rule.nodes(0, i) = 0.5 * (x[i] - x[mirror]);
    rule.weights[i] = 0.5 * (w[i] + w[mirror]);
  }
  if (n % 2 == 1) rule.nodes(0, n / 2) = 0.0;
  return rule;
}

QuadratureRule tensor_rule(const QuadratureRule& rule1d, int dim)
{
  if (rule1d.dim != 1) throw std::invalid_argument("tensor_rule: base rule must be one-dimensional");
  if (dim < 1) throw std::invalid_argument("tensor_rule: dim must be >= 1");

  const auto n = static_cast<long long>(rule1d.size());
  double total = std::pow(static_cast<double>(n), dim);
  if (total > 1e7) {
    throw std::invalid_argument("tensor_rule: " + std::to_string(static_cast<long long>(total)) +
                                " nodes exceeds the 1e7 limit");
  }
  const auto count = static_cast<Eigen::Index>(total);

  QuadratureRule rule;
  rule.dim = dim;
  rule.nodes.resize(dim, count);
  rule.weights.resize(count);
  std::vector<long long> digit(dim, 0);
  for (Eigen::Index i = 0; i < count; ++i) {
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
      rule.nodes(j, i) = rule1d.nodes(0, digit[j]);
      w *= rule1d.weights[digit[j]];
    }
    rule.weights[i] = w;
    // Last coordinate varies fastest.
    for (int j = dim - 1; j >= 0; --j) {
      if (++digit[j] < n) break;
      digit[j] = 0;
    }
  }
  return rule;
}

cplx integrate(const QuadratureRule& rule, std::span<const cplx> values)
{
  if (values.size() != rule.size()) {
    throw std::invalid_argument("integrate: " + std::to_string(values.size()) + " values for " +
                                std::to_string(rule.size()) + " nodes");
  }
  cplx s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += rule.weights[i] * values[i];
  return s;
}

double integrate(const QuadratureRule& rule, std::span<const double> values)
{
  if (values.size() != rule.size()) {
    throw std::invalid_argument("integrate: " + std::to_string(values.size()) + " values for " +
                                std::to_string(rule.size()) + " nodes");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += rule.weights[i] * values[i];
  return s;
}

QuadratureRule rescale_for_packet_products(const QuadratureRule& rule)
{
  QuadratureRule out = rule;
  out.nodes *= 1.0 / std::sqrt(2.0);
  out.weights *= std::pow(2.0, -0.5 * rule.dim);
  return out;
}

}  // namespace gwpt
