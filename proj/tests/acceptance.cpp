// Acceptance run: one [PASS]/[FAIL] line per criterion, details indented below.
// Usage: acceptance [reference-cache-dir]
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gwpt/experiment.hpp"

using namespace gwpt;

namespace {

std::string g_cache = "ref_cache";

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void note(const char* fmt, auto... args)
  {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    details.emplace_back(buf);
  }
  // Records a sub-check; a failed one fails the criterion.
  bool expect(bool ok, const char* fmt, auto... args)
  {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + buf);
    pass = pass && ok;
    return ok;
  }
};

ReferenceStore& refs()
{
  static ReferenceStore store(g_cache);
  return store;
}

double error_of(const ExperimentConfig& cfg)
{
  const ResultRow r = run_single(cfg, refs().get(cfg));
  if (!r.error.empty()) throw std::runtime_error(r.error);
  return r.l2_error;
}

ExperimentConfig example1(double eps)
{
  ExperimentConfig c;
  c.example = Example::cosine1d;
  c.eps = eps;
  c.t_final = 0.125;
  c.dt_c = 1.0 / 128;
  c.dt_gt = 1.0 / 2048;
  c.n_packets = 30;
  c.quad_per_axis = 30;
  return c;
}

// Strictly decreasing while above twice the smallest value, then staying
// within that band. Returns false and names the offending pair otherwise.
bool decreases_to_plateau(const std::vector<double>& e, std::string& why)
{
  const double floor = *std::min_element(e.begin(), e.end());
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i - 1] > 2 * floor) {
      if (!(e[i] < e[i - 1])) {
        why = "not decreasing at position " + std::to_string(i);
        return false;
      }
    } else if (e[i] > 2 * floor) {
      why = "left the plateau at position " + std::to_string(i);
      return false;
    }
  }
  return true;
}

// --------------------------------------------------------------------------

Outcome table2()
{
  Outcome o;
  const struct {
    int n;
    double paper_k1, paper_kinf;
  } rows[] = {{4, 0.0038, 0.0037}, {9, 2.2182e-4, 2.2075e-4}};
  for (const auto& row : rows) {
    ExperimentConfig c;
    c.example = Example::cosine2d;
    c.eps = 1.0 / 128;
    c.dt_c = 1.0 / 128;
    c.dt_gt = 1.0 / 2048;
    c.t_final = 2.0;
    c.quad_per_axis = 50;
    c.n_packets = row.n;
    c.index_norm = IndexNorm::l1;
    const double k1 = error_of(c);
    c.index_norm = IndexNorm::linf;
    const double kinf = error_of(c);
    o.expect(k1 <= 3 * row.paper_k1 && k1 >= row.paper_k1 / 3,
             "n=%d K_1 error %.4e vs paper %.4e (ratio %.3f, need within 3x)", row.n, k1, row.paper_k1,
             k1 / row.paper_k1);
    o.note("      n=%d K_inf error %.4e vs paper %.4e", row.n, kinf, row.paper_kinf);
    o.expect(std::abs(kinf - k1) <= 0.05 * k1, "n=%d |K_inf - K_1| / K_1 = %.3e (need <= 5%%)", row.n,
             std::abs(kinf - k1) / k1);
  }
  return o;
}

Outcome spectral_n()
{
  Outcome o;
  const std::vector<int> ns{5, 10, 15, 20, 25, 30};
  for (double eps : {1.0 / 64, 1.0 / 256}) {
    std::vector<double> e;
    std::string line;
    for (int n : ns) {
      ExperimentConfig c = example1(eps);
      c.n_packets = n;
      e.push_back(error_of(c));
      char buf[64];
      std::snprintf(buf, sizeof buf, " n=%d:%.3e", n, e.back());
      line += buf;
    }
    o.note("eps=1/%.0f%s", 1 / eps, line.c_str());
    std::string why;
    o.expect(decreases_to_plateau(e, why), "eps=1/%.0f strictly decreasing until plateau %s", 1 / eps,
             why.c_str());
    o.expect(e[5] / e[1] <= 1e-3, "eps=1/%.0f error(30)/error(10) = %.3e (need <= 1e-3)", 1 / eps, e[5] / e[1]);
  }
  return o;
}

Outcome temporal_order()
{
  Outcome o;
  // Gate: self-convergence against a dt_gt = 1/32768 run on the reference grid.
  const std::vector<double> dts{1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048};
  const double eps = 1.0 / 16;
  ExperimentConfig base = example1(eps);
  base.quad_per_axis = 40;
  const PeriodicGrid grid = base.resolved_meshing().grid(1, eps);
  const auto psi_at = [&](double dt_gt) {
    ExperimentConfig c = base;
    c.dt_gt = dt_gt;
    SimulationState sim(potential_for(c), datum_for(c), settings_for(c));
    sim.advance(c.t_final);
    return sim.psi_on(grid);
  };
  const GridWaveFunction fine = psi_at(1.0 / 32768);
  std::vector<double> e;
  for (double dt : dts) e.push_back(l2_error(psi_at(dt), fine));
  int good = 0, best = 0;
  for (std::size_t i = 1; i < e.size(); ++i) {
    const double order = std::log2(e[i - 1] / e[i]);
    o.note("eps=1/16 self-convergence dt_gt=1/%.0f -> 1/%.0f: %.3e -> %.3e, order %.3f", 1 / dts[i - 1],
           1 / dts[i], e[i - 1], e[i], order);
    good = std::abs(order - 4.0) <= 0.3 ? good + 1 : 0;
    best = std::max(best, good);
  }
  o.expect(best >= 3, "%d consecutive halvings with order 4 +- 0.3 (need >= 3)", best);

  // Against the split-step reference, reported only: the reference floor near
  // 1e-13 arrives after about two halvings.
  for (double eps_r : {1.0 / 16, 1.0 / 64}) {
    std::string line;
    for (double dt : {1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048}) {
      ExperimentConfig c = example1(eps_r);
      c.quad_per_axis = 50;
      c.dt_gt = dt;
      char buf[64];
      std::snprintf(buf, sizeof buf, " %.3e", error_of(c));
      line += buf;
    }
    o.note("info: vs reference, eps=1/%.0f, dt_gt=1/256..1/2048:%s", 1 / eps_r, line.c_str());
  }
  return o;
}

Outcome dtc_independence()
{
  Outcome o;
  for (double eps : {1.0 / 64, 1.0 / 256, 1.0 / 1024}) {
    std::vector<double> e;
    for (double dtc : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
      ExperimentConfig c = example1(eps);
      c.dt_c = dtc;
      e.push_back(error_of(c));
    }
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    o.expect((*hi - *lo) / *lo <= 0.10,
             "eps=1/%.0f dt_c=1/32,1/64,1/128: %.3e %.3e %.3e, spread %.1f%% (need <= 10%%)", 1 / eps, e[0], e[1],
             e[2], 100 * (*hi - *lo) / *lo);
  }
  return o;
}

Outcome quadrature_sweep()
{
  Outcome o;
  const std::vector<int> nq{4, 6, 8, 10, 12, 15, 20, 25, 30};
  for (double eps : {1.0 / 64, 1.0 / 256}) {
    std::vector<double> e;
    std::string line;
    for (int q : nq) {
      ExperimentConfig c = example1(eps);
      c.n_packets = 10;
      c.quad_per_axis = q;
      e.push_back(error_of(c));
      char buf[64];
      std::snprintf(buf, sizeof buf, " %d:%.3e", q, e.back());
      line += buf;
    }
    o.note("eps=1/%.0f N_Q%s", 1 / eps, line.c_str());
    std::string why;
    o.expect(decreases_to_plateau(e, why), "eps=1/%.0f decreases monotonically to the floor %s", 1 / eps,
             why.c_str());
    const double floor = *std::min_element(e.begin(), e.end());
    o.expect(e[5] <= 2 * floor, "eps=1/%.0f N_Q=n+5=15 error %.3e vs floor %.3e (need within 2x)", 1 / eps, e[5],
             floor);
  }
  return o;
}

Outcome harmonic()
{
  Outcome o;
  for (int d : {1, 2}) {
    ExperimentConfig c;
    c.example = Example::harmonic;
    c.harmonic_dim = d;
    c.eps = 1.0 / 128;
    c.t_final = 1.0;
    c.dt_c = 1.0 / 64;
    c.dt_gt = 1.0 / 1024;
    c.n_packets = 10;
    c.quad_per_axis = 20;
    SimulationState sim(potential_for(c), datum_for(c), settings_for(c));
    const CVec c0 = sim.coeffs().c;
    sim.advance(c.t_final);
    const double drift = (sim.coeffs().c - c0).cwiseAbs().maxCoeff();
    o.expect(drift <= 1e-12, "d=%d coefficients constant: max |c(1) - c(0)| = %.3e (need <= 1e-12)", d, drift);
    if (d == 1) {
      const double err = error_of(c);
      o.expect(err <= 1e-8, "d=1 psi vs reference at t=1: %.3e (need <= 1e-8)", err);
    }
  }
  return o;
}

Outcome invariants()
{
  Outcome o;
  ExperimentConfig c = example1(1.0 / 128);
  c.t_final = 4.0;
  c.dt_c = 1.0 / 64;
  c.dt_gt = 1.0 / 1024;
  c.quad_per_axis = 35;
  SimulationState sim(potential_for(c), datum_for(c), settings_for(c));
  sim.advance(c.t_final);
  const Diagnostics& d = sim.diagnostics();
  o.expect(d.symplectic <= 1e-9, "symplectic residual %.3e (need <= 1e-9)", d.symplectic);
  o.expect(d.clean_lemma <= 1e-8, "det/gamma lemma residual %.3e (need <= 1e-8)", d.clean_lemma);
  o.expect(d.alpha_bb <= 1e-8, "alpha_I - B^T B residual %.3e (need <= 1e-8)", d.alpha_bb);
  o.expect(d.norm_drift <= 1e-9, "coefficient norm drift %.3e (need <= 1e-9)", d.norm_drift);
  o.expect(d.hermitian <= 1e-10, "F Hermiticity residual %.3e (need <= 1e-10)", d.hermitian);

  const double alpha_i = sim.gwpt().alpha(0, 0).imag();
  const auto rule = gauss_hermite_1d(40);
  double eig = 0.0;
  for (int k = 0; k <= 5; ++k) eig = std::max(eig, quadratic_eigencheck_1d(sim.hwp(), alpha_i, k, rule));
  o.expect(eig <= 1e-7, "eigencheck at t=4, k<=5: %.3e (need <= 1e-7)", eig);

  // Gram matrix of K_1^10 in 2D, initially and after an Example 2 run.
  ExperimentConfig c2;
  c2.example = Example::cosine2d;
  c2.eps = 1.0 / 128;
  c2.t_final = 1.0;
  c2.dt_c = 1.0 / 64;
  c2.dt_gt = 1.0 / 1024;
  c2.n_packets = 10;
  c2.quad_per_axis = 15;
  SimulationState sim2(potential_for(c2), datum_for(c2), settings_for(c2));
  const auto gram_residual = [&] {
    const QuadratureRule& r = sim2.packet_rule();
    const BasisEvaluation b = recurrence_eval(sim2.hwp(), sim2.index_set(), r.nodes, Envelope::stripped);
    const CMat G = b.values.conjugate() * r.weights.asDiagonal() * b.values.transpose();
    return inf_norm(G - CMat::Identity(G.rows(), G.cols()));
  };
  const double g0 = gram_residual();
  sim2.advance(c2.t_final);
  const double g1 = gram_residual();
  o.expect(std::max(g0, g1) <= 1e-9, "Gram residual K_1^10 (2D): t=0 %.3e, t=1 %.3e (need <= 1e-9)", g0, g1);
  return o;
}

Outcome timing()
{
  Outcome o;
  ExperimentConfig c = example1(1.0 / 64);
  c.t_final = 4.0;
  c.dt_c = 1.0 / 64;
  c.dt_gt = 1.0 / 1024;
  c.reference = ReferenceMode::none;
  const std::vector<int> ns{8, 16, 32, 64};
  const TimingTable t = timing_table(c, ns, {1.0 / 64, 1.0 / 256, 1.0 / 1024}, 21, 5);
  std::vector<double> loop(ns.size(), 1e300), gal(ns.size(), 1e300);
  for (const auto& cell : t.cells) {
    const auto i = std::find(ns.begin(), ns.end(), cell.n) - ns.begin();
    loop[i] = std::min(loop[i], cell.seconds);
    gal[i] = std::min(gal[i], cell.galerkin_seconds);
    o.note("n=%d eps=1/%.0f loop %.4f s (Galerkin %.4f s)", cell.n, 1 / cell.eps, cell.seconds,
           cell.galerkin_seconds);
  }
  for (int n : ns) {
    o.expect(t.eps_ratio.at(n) <= 1.3, "n=%d max/min loop time over eps = %.3f (need <= 1.3)", n, t.eps_ratio.at(n));
  }
  // Superlinear in n: faster than n over the whole range and on the last
  // doubling. At small n fixed per-step costs dominate, so early doublings
  // are only reported.
  for (std::size_t i = 1; i < ns.size(); ++i) {
    o.note("doubling n=%d -> %d: loop %.2fx, Galerkin %.2fx", ns[i - 1], ns[i], loop[i] / loop[i - 1],
           gal[i] / gal[i - 1]);
  }
  const double range = double(ns.back()) / ns.front();
  o.expect(gal.back() / gal.front() > range, "Galerkin time n=%d -> %d grows %.2fx (need > %.0fx)", ns.front(),
           ns.back(), gal.back() / gal.front(), range);
  o.expect(loop.back() / loop.front() > range, "loop time n=%d -> %d grows %.2fx (need > %.0fx)", ns.front(),
           ns.back(), loop.back() / loop.front(), range);
  const std::size_t m = ns.size() - 1;
  o.expect(loop[m] > 2 * loop[m - 1], "loop time n=%d -> %d grows %.2fx (need > 2x)", ns[m - 1], ns[m],
           loop[m] / loop[m - 1]);
  return o;
}

Outcome oracles()
{
  Outcome o;
  // assemble_F for polynomial U against ladder closed forms, k, l <= 5.
  {
    const HagedornParams h = hwp_init_params(1);
    auto K = std::make_shared<const MultiIndexSet>(1, 8, IndexNorm::l1);
    const QuadratureRule r = rescale_for_packet_products(gauss_hermite_1d(30));
    const BasisEvaluation b = recurrence_eval(h, K, r.nodes, Envelope::stripped);
    double worst = 0.0;
    for (int power = 0; power <= 3; ++power) {
      std::vector<double> U(r.size());
      for (std::size_t i = 0; i < U.size(); ++i) U[i] = std::pow(r.nodes(0, static_cast<Eigen::Index>(i)), power);
      const CMat F = assemble_F(b, U, r).F;
      for (int l = 0; l <= 5; ++l) {
        CVec e = CVec::Zero(9);
        e[l] = 1.0;
        for (int k = 0; k < power; ++k) e = position_apply(h, *K, 0, e);
        worst = std::max(worst, (F.col(l).head(6) - e.head(6)).cwiseAbs().maxCoeff());
      }
    }
    o.expect(worst <= 1e-10, "assemble_F vs ladder closed forms for U = 1, eta, eta^2, eta^3: %.3e (need <= 1e-10)",
             worst);
  }
  // Coefficient RK4 against the matrix exponential, random 6x6 Hermitian F.
  {
    std::mt19937 rng(2024);
    std::normal_distribution<double> g;
    CMat A(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) A(i, j) = cplx(g(rng), g(rng));
    const CMat F = (A + A.adjoint()) / 2.0;
    const double eps = 1.0 / 64, T = 4.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(F);
    CVec ph(6);
    for (int i = 0; i < 6; ++i) ph[i] = std::exp(-I * std::sqrt(eps) * es.eigenvalues()[i] * T);
    const CVec c0 = CVec::Ones(6);
    const CVec exact = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * c0;
    std::vector<double> e;
    for (int steps : {8, 16, 32}) {
      CVec y = c0;
      for (int s = 0; s < steps; ++s) y = coeff_rk4_step(y, F, F, F, eps, T / steps);
      e.push_back((y - exact).norm());
    }
    const double p1 = std::log2(e[0] / e[1]), p2 = std::log2(e[1] / e[2]);
    o.expect(std::abs(p1 - 4) <= 0.3 && std::abs(p2 - 4) <= 0.3,
             "coefficient RK4 vs exp(-i sqrt(eps) F t): errors %.3e %.3e %.3e, orders %.3f %.3f", e[0], e[1], e[2], p1,
             p2);
  }
  // Gauss-Hermite exactness to degree 2N - 1.
  {
    double worst = 0.0;
    for (int n = 1; n <= 30; ++n) {
      const auto r = gauss_hermite_1d(n);
      for (int m = 0; m <= 2 * n - 1; ++m) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes(0, i), m);
        const double scale = std::tgamma(0.5 * (m + 1));
        const double exact = m % 2 ? 0.0 : scale;
        worst = std::max(worst, std::abs(s - exact) / scale);
      }
    }
    o.expect(worst <= 1e-12, "Gauss-Hermite monomials up to degree 2N-1, N <= 30: relative error %.3e (need <= 1e-12)",
             worst);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv)
{
  if (argc > 1) g_cache = argv[1];
  const struct {
    int id;
    const char* name;
    std::function<Outcome()> run;
  } criteria[] = {
      {1, "2D K_1 / K_inf errors against the published table", table2},
      {2, "spectral convergence in n", spectral_n},
      {3, "fourth-order convergence in dt_gt", temporal_order},
      {4, "error independent of dt_c across eps", dtc_independence},
      {5, "quadrature convergence in N_Q", quadrature_sweep},
      {6, "quadratic potential is exact", harmonic},
      {7, "invariant suite", invariants},
      {8, "eps-independent cost, superlinear in n", timing},
      {9, "oracle equivalence", oracles},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
