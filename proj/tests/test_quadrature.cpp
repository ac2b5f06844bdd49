#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gwpt/quadrature.hpp"

using namespace gwpt;

namespace {

const double sqrt_pi = std::sqrt(std::numbers::pi);

// int x^m exp(-x^2) dx
double moment(int m) { return m % 2 ? 0.0 : std::tgamma(0.5 * (m + 1)); }

// int |x|^m exp(-x^2) dx, the size of the terms that cancel in an odd moment.
double abs_moment(int m) { return std::tgamma(0.5 * (m + 1)); }

double integrate_fn(const QuadratureRule& r, auto f)
{
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r.nodes.col(static_cast<Eigen::Index>(i)));
  return integrate(r, std::span<const double>(v));
}

// Physicists' H_3.
double h3(double x) { return 8 * x * x * x - 12 * x; }

}  // namespace

TEST_CASE("small Gauss-Hermite rules")
{
  const auto r1 = gauss_hermite_1d(1);
  CHECK(r1.nodes(0, 0) == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(sqrt_pi).epsilon(1e-15));

  const auto r2 = gauss_hermite_1d(2);
  CHECK(r2.nodes(0, 0) == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r2.nodes(0, 1) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(sqrt_pi / 2).epsilon(1e-15));
  CHECK(r2.weights[1] == doctest::Approx(sqrt_pi / 2).epsilon(1e-15));
  CHECK(integrate_fn(r2, [](const auto& x) { return x[0] * x[0]; }) == doctest::Approx(sqrt_pi / 2));

  const auto r5 = gauss_hermite_1d(5);
  CHECK(integrate_fn(r5, [](const auto&) { return 1.0; }) == doctest::Approx(sqrt_pi).epsilon(1e-14));
  CHECK(std::abs(integrate_fn(r5, [](const auto& x) { return x[0]; })) < 1e-15);

  const auto r4 = gauss_hermite_1d(4);
  CHECK(integrate_fn(r4, [](const auto& x) { return h3(x[0]) * h3(x[0]); }) ==
        doctest::Approx(48 * sqrt_pi).epsilon(1e-13));
}

TEST_CASE("tensor rules")
{
  const auto t1 = tensor_rule(gauss_hermite_1d(1), 2);
  CHECK(t1.size() == 1);
  CHECK(t1.nodes.col(0).norm() == 0.0);
  CHECK(t1.weights[0] == doctest::Approx(std::numbers::pi));

  const auto t2 = tensor_rule(gauss_hermite_1d(2), 2);
  CHECK(t2.size() == 4);
  CHECK(t2.weights.sum() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(integrate_fn(t2, [](const auto& x) { return x[0] * x[0] * x[1] * x[1]; }) ==
        doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
  // First coordinate varies slowest.
  CHECK(t2.nodes(0, 0) == t2.nodes(0, 1));
  CHECK(t2.nodes(1, 0) != t2.nodes(1, 1));

  CHECK_THROWS(tensor_rule(gauss_hermite_1d(200), 4));
  CHECK_THROWS(tensor_rule(t2, 2));
}

TEST_CASE("argument checks")
{
  CHECK_THROWS(gauss_hermite_1d(0));
  CHECK_THROWS(gauss_hermite_1d(201));
  const auto r = gauss_hermite_1d(3);
  std::vector<double> wrong(4, 1.0);
  CHECK_THROWS(integrate(r, std::span<const double>(wrong)));
}

TEST_CASE("monomial exactness up to degree 2N-1")
{
  for (int n = 1; n <= 30; ++n) {
    const auto r = gauss_hermite_1d(n);
    for (int m = 0; m <= 2 * n - 1; ++m) {
      const double got = integrate_fn(r, [m](const auto& x) { return std::pow(x[0], m); });
      CAPTURE(n);
      CAPTURE(m);
      const double scale = m % 2 ? abs_moment(m) : moment(m);
      CHECK(std::abs(got - moment(m)) / std::max(1.0, scale) <= 1e-12);
    }
  }
}

TEST_CASE("orthonormal Hermite exactness for large rules")
{
  // Degree-2N-1 exactness expressed in the well-conditioned orthonormal basis.
  for (int n : {50, 100, 200}) {
    const auto r = gauss_hermite_1d(n);
    Mat G = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const Vec p = orthonormal_hermite(n - 1, r.nodes(0, i));
      G += r.weights[i] * p * p.transpose();
    }
    CAPTURE(n);
    CHECK((G - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("weights, symmetry and node residuals")
{
  for (int n = 1; n <= 200; n += (n < 20 ? 1 : 17)) {
    const auto r = gauss_hermite_1d(n);
    CAPTURE(n);
    CHECK(r.weights.minCoeff() > 0.0);
    CHECK(r.weights.sum() == doctest::Approx(sqrt_pi).epsilon(1e-12));
    for (int i = 0; i < n; ++i) {
      CHECK(r.nodes(0, i) == -r.nodes(0, n - 1 - i));
      CHECK(r.weights[i] == r.weights[n - 1 - i]);
      const Vec p = orthonormal_hermite(n, r.nodes(0, i));
      CHECK(std::abs(p[n]) <= 1e-8 * p.cwiseAbs().maxCoeff());
    }
    for (int i = 1; i < n; ++i) CHECK(r.nodes(0, i - 1) < r.nodes(0, i));
  }
}

TEST_CASE("orthonormal Hermite values")
{
  const Vec p = orthonormal_hermite(3, 0.7);
  // p_k = H_k / sqrt(2^k k! sqrt(pi))
  const double x = 0.7;
  const double norm3 = std::sqrt(8 * 6 * sqrt_pi);
  CHECK(p[0] == doctest::Approx(1 / std::sqrt(sqrt_pi)));
  CHECK(p[1] == doctest::Approx(2 * x / std::sqrt(2 * sqrt_pi)));
  CHECK(p[3] == doctest::Approx(h3(x) / norm3));
}

TEST_CASE("rescaling for packet products")
{
  for (int d : {1, 2}) {
    const auto r = rescale_for_packet_products(tensor_rule(gauss_hermite_1d(6), d));
    // int exp(-2|eta|^2) = (pi/2)^(d/2)
    CHECK(r.weights.sum() == doctest::Approx(std::pow(std::numbers::pi / 2, 0.5 * d)).epsilon(1e-14));
    // int eta^2 exp(-2 eta^2) d eta = sqrt(pi/2)/4 in 1D
    if (d == 1) {
      CHECK(integrate_fn(r, [](const auto& x) { return x[0] * x[0]; }) ==
            doctest::Approx(std::sqrt(std::numbers::pi / 2) / 4).epsilon(1e-14));
    }
  }
}
