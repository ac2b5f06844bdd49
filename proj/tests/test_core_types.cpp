#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "gwpt/multi_index.hpp"
#include "gwpt/potential.hpp"
#include "gwpt/types.hpp"

using namespace gwpt;

namespace {

long binomial(int n, int k)
{
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Brute-force enumeration of the l1 ball.
std::set<MultiIndex> brute_l1(int d, int n)
{
  std::set<MultiIndex> out;
  MultiIndex k(d, 0);
  while (true) {
    int s = 0;
    for (int v : k) s += v;
    if (s <= n) out.insert(k);
    int j = d - 1;
    while (j >= 0 && k[j] == n) k[j--] = 0;
    if (j < 0) break;
    ++k[j];
  }
  return out;
}

Vec v1(double x) { return Vec::Constant(1, x); }

Vec v2(double x, double y)
{
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("index set cardinalities")
{
  CHECK(MultiIndexSet(2, 4, IndexNorm::l1).size() == 15);
  CHECK(MultiIndexSet(2, 9, IndexNorm::linf).size() == 100);
  CHECK(MultiIndexSet(2, 9, IndexNorm::l1).size() == 55);
  CHECK(MultiIndexSet(2, 4, IndexNorm::linf).size() == 25);

  const MultiIndexSet ground(1, 0, IndexNorm::l1);
  REQUIRE(ground.size() == 1);
  CHECK(ground[0] == MultiIndex{0});

  for (int d = 1; d <= 3; ++d) {
    for (int n = 0; n <= 10; ++n) {
      const MultiIndexSet K(d, n, IndexNorm::l1);
      CHECK(static_cast<long>(K.size()) == binomial(n + d, d));
      CHECK(std::set<MultiIndex>(K.indices().begin(), K.indices().end()) == brute_l1(d, n));
    }
  }
}

TEST_CASE("graded-lex order, closure and neighbour tables")
{
  for (auto norm : {IndexNorm::l1, IndexNorm::linf}) {
    const MultiIndexSet K(2, 6, norm);
    for (std::size_t i = 1; i < K.size(); ++i) CHECK(graded_lex_less(K[i - 1], K[i]));
    for (std::size_t i = 0; i < K.size(); ++i) {
      CHECK(K.find(K[i]).value() == i);
      for (int j = 0; j < 2; ++j) {
        const std::size_t lo = K.lower(i, j);
        if (K[i][j] == 0) {
          CHECK(lo == MultiIndexSet::npos);
        } else {
          REQUIRE(lo != MultiIndexSet::npos);
          MultiIndex expect = K[i];
          --expect[j];
          CHECK(K[lo] == expect);
          CHECK(lo < i);
          CHECK(K.raise(lo, j) == i);
        }
        MultiIndex up = K[i];
        ++up[j];
        CHECK((K.raise(i, j) != MultiIndexSet::npos) == K.contains(up));
      }
    }
  }
  CHECK(graded_lex_less({0, 2}, {1, 1}));
  CHECK(graded_lex_less({1, 1}, {2, 0}));
  CHECK(graded_lex_less({2, 0}, {0, 3}));
  CHECK_FALSE(graded_lex_less({1, 1}, {1, 1}));

  // Two constructions give identical order.
  CHECK(MultiIndexSet(3, 5, IndexNorm::l1).indices() == MultiIndexSet(3, 5, IndexNorm::l1).indices());
}

TEST_CASE("index norm names")
{
  CHECK(to_string(IndexNorm::linf) == "linf");
  CHECK(index_norm_from_string("l1") == IndexNorm::l1);
  CHECK_THROWS(index_norm_from_string("l2"));
}

TEST_CASE("Epsilon range")
{
  CHECK(Epsilon(1.0).value() == 1.0);
  CHECK_THROWS_AS(Epsilon(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Epsilon(1.5), std::invalid_argument);
  CHECK_THROWS_AS(Epsilon(-0.1), std::invalid_argument);
}

TEST_CASE("Taylor remainder examples")
{
  const Potential V = potentials::cosine1d();
  // High-precision oracle values (40-digit arithmetic).
  CHECK(taylor_remainder2(V, v1(0.0), v1(0.1)) == doctest::Approx(-4.165278025766095562e-6).epsilon(1e-13));
  // 1 - cos(pi/2 + s) - 1 - s = sin(s) - s < 0.
  CHECK(taylor_remainder2(V, v1(std::numbers::pi / 2), v1(0.1)) ==
        doctest::Approx(-1.6658335317184769319e-4).epsilon(1e-13));

  Mat A(2, 2);
  A << 2.0, 0.5, 0.5, 1.0;
  Potential quad;
  quad.dim = 2;
  quad.value = [A](const Vec& x) { return 0.5 * x.dot(A * x); };
  quad.gradient = [A](const Vec& x) { return Vec(A * x); };
  quad.hessian = [A](const Vec&) { return A; };
  CHECK(std::abs(taylor_remainder2(quad, v2(0.3, -1.2), v2(0.7, 0.4))) < 1e-14);
}

TEST_CASE("series remainders against 40-digit oracle")
{
  struct Row {
    double s, rc, rs;
  };
  const Row rows[] = {
      {1e-3, 4.1666665277777802579e-14, -1.6666665833333353175e-10},
      {0.0099, 4.0024702989096993832e-10, -1.6171570751014108349e-7},
      {0.0101, 4.3358352983580981875e-10, -1.7171595749375216634e-7},
      {0.1, 4.165278025766095562e-6, -1.6658335317184769319e-4},
      {0.5, 2.5825618903727161163e-3, -2.0574461395796999727e-2},
      {1.001, 4.0461064872446556542e-2, -1.589891337117430761e-1},
  };
  for (const auto& r : rows) {
    CAPTURE(r.s);
    CHECK(rem_cos(r.s) == doctest::Approx(r.rc).epsilon(1e-13));
    CHECK(rem_sin(r.s) == doctest::Approx(r.rs).epsilon(1e-13));
    CHECK(rem_cos(-r.s) == doctest::Approx(r.rc).epsilon(1e-13));
    CHECK(rem_sin(-r.s) == doctest::Approx(-r.rs).epsilon(1e-13));
  }
}

TEST_CASE("exact remainder agrees with the naive difference where the latter is well conditioned")
{
  for (const auto& V : {potentials::cosine1d(), potentials::cosine2d()}) {
    for (double q0 : {0.0, 0.4, std::numbers::pi / 2, 2.5}) {
      for (double s0 : {0.1, 0.2, 0.5, 0.9, 1.0}) {
        const Vec q = Vec::Constant(V.dim, q0);
        Vec s = Vec::Constant(V.dim, s0);
        if (V.dim == 2) s[1] = -0.7 * s0;
        const double exact = taylor_remainder2(V, q, s);
        const double naive = naive_taylor_remainder2(V, q, s);
        CAPTURE(q0);
        CAPTURE(s0);
        CHECK(std::abs(exact - naive) <= 1e-8 * std::abs(exact));
      }
    }
  }
}

TEST_CASE("builtin potentials")
{
  const Potential c1 = potentials::cosine1d();
  const Potential c2 = potentials::cosine2d();
  const Potential h2 = potentials::harmonic(2);
  CHECK(c1.value(v1(std::numbers::pi / 2)) == doctest::Approx(1.0));
  CHECK(c2.gradient(v2(0, 0)).norm() == 0.0);
  CHECK(h2.hessian(v2(3.0, -1.0)).isApprox(Mat::Identity(2, 2)));
  CHECK(c2.value(v2(0, 0)) == 0.0);

  // Finite-difference consistency of the derivatives.
  for (const auto& V : {c1, c2, h2}) {
    const Vec x = V.dim == 1 ? v1(0.83) : v2(0.83, -1.9);
    const double h = 1e-5;
    const Vec g = V.gradient(x);
    const Mat H = V.hessian(x);
    CHECK((H - H.transpose()).norm() == 0.0);
    for (int j = 0; j < V.dim; ++j) {
      Vec e = Vec::Zero(V.dim);
      e[j] = h;
      const double fd = (V.value(x + e) - V.value(x - e)) / (2 * h);
      CHECK(fd == doctest::Approx(g[j]).epsilon(1e-6));
      const Vec gfd = (V.gradient(x + e) - V.gradient(x - e)) / (2 * h);
      for (int i = 0; i < V.dim; ++i) CHECK(gfd[i] == doctest::Approx(H(i, j)).epsilon(1e-6));
    }
  }
  CHECK(potentials::by_name("harmonic2d").dim == 2);
  CHECK_THROWS(potentials::by_name("nope"));
}

TEST_CASE("polynomial potential")
{
  const Potential quartic = potentials::polynomial({0.0, 0.0, 0.5, 0.0, 0.1}, 1);
  CHECK(quartic.value(v1(2.0)) == doctest::Approx(2.0 + 1.6));
  // Exact tail 0.1 [(q+s)^4 - q^4 - 4 q^3 s - 6 q^2 s^2] = 0.1 (4 q s^3 + s^4).
  const double q = 0.7, s = 0.3;
  CHECK(taylor_remainder2(quartic, v1(q), v1(s)) == doctest::Approx(0.1 * (4 * q * s * s * s + s * s * s * s)));
  CHECK(std::abs(taylor_remainder2(potentials::polynomial({1.0, -2.0, 3.0}, 1), v1(0.4), v1(1.3))) < 1e-15);
  CHECK_THROWS_AS(potentials::polynomial(std::vector<double>(10, 1.0), 1), std::invalid_argument);
}
