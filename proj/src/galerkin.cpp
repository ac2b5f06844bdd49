#include "gwpt/galerkin.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <Eigen/LU>

#include "gwpt/rk4.hpp"

namespace gwpt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Beyond this |eta - q_h|^2 every packet in use underflows to zero.
constexpr double kEnvelopeCutoff = 1000.0;
constexpr Eigen::Index kChunk = 8192;

}  // namespace

Vec residue_U(const PointSet& eta, const Vec& q, const Mat& B, double eps, const Potential& V)
{
  if (eta.rows() != q.size()) throw std::invalid_argument("residue_U: dimension mismatch");
  const Eigen::PartialPivLU<Mat> lu(B);
  const Mat shifts = std::sqrt(eps) * lu.solve(eta);
  const double scale = std::pow(eps, -1.5);
  Vec u(eta.cols());
  for (Eigen::Index i = 0; i < eta.cols(); ++i) {
    u[i] = scale * taylor_remainder2(V, q, shifts.col(i));
  }
  return u;
}

GalerkinMatrix assemble_F(const BasisEvaluation& basis, std::span<const double> U,
                          const QuadratureRule& packet_rule)
{
  const auto npts = basis.values.cols();
  if (static_cast<std::size_t>(npts) != U.size() || npts != packet_rule.weights.size()) {
    throw std::invalid_argument("assemble_F: basis, U and rule sizes disagree");
  }
  if (basis.envelope != Envelope::stripped) {
    throw std::invalid_argument("assemble_F: basis values must be envelope-stripped");
  }
  Vec wu(npts);
  for (Eigen::Index i = 0; i < npts; ++i) wu[i] = packet_rule.weights[i] * U[i];

  GalerkinMatrix out;
  out.K = basis.K;
  const CMat weighted = basis.values * wu.asDiagonal();
  out.F = basis.values.conjugate() * weighted.transpose();

  const double scale = inf_norm(out.F);
  out.hermiticity_residual = scale > 0.0 ? inf_norm(out.F - out.F.adjoint()) / scale : 0.0;
  out.F = 0.5 * (out.F + out.F.adjoint()).eval();
  return out;
}

CVec coeff_rk4_step(const CVec& c, const CMat& F_start, const CMat& F_mid, const CMat& F_end,
                    double eps, double dt)
{
  const cplx a = -I * std::sqrt(eps);
  const CVec k1 = a * (F_start * c);
  const CVec k2 = a * (F_mid * (c + 0.5 * dt * k1));
  const CVec k3 = a * (F_mid * (c + 0.5 * dt * k2));
  const CVec k4 = a * (F_end * (c + dt * k3));
  return c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

CoefficientVector coeff_rk4_step(const CoefficientVector& c,
                                 const std::function<CMat(double)>& F_at, double eps, double dt)
{
  CoefficientVector out = c;
  out.c = coeff_rk4_step(c.c, F_at(c.t), F_at(c.t + 0.5 * dt), F_at(c.t + dt), eps, dt);
  out.t = c.t + dt;
  return out;
}

CVec reconstruct_w(const CoefficientVector& coeffs, const HagedornParams& hwp, const PointSet& points)
{
  const auto npts = points.cols();
  CVec out = CVec::Zero(npts);

  std::vector<Eigen::Index> near;
  near.reserve(static_cast<std::size_t>(npts));
  for (Eigen::Index i = 0; i < npts; ++i) {
    if ((points.col(i) - hwp.q).squaredNorm() <= kEnvelopeCutoff) near.push_back(i);
  }

  const cplx phase = std::exp(I * hwp.S);
  for (std::size_t start = 0; start < near.size(); start += kChunk) {
    const auto count = static_cast<Eigen::Index>(std::min<std::size_t>(kChunk, near.size() - start));
    PointSet chunk(points.rows(), count);
    for (Eigen::Index i = 0; i < count; ++i) chunk.col(i) = points.col(near[start + i]);
    const BasisEvaluation basis = recurrence_eval(hwp, coeffs.K, chunk, Envelope::full);
    const CVec vals = basis.values.transpose() * coeffs.c;
    for (Eigen::Index i = 0; i < count; ++i) out[near[start + i]] = phase * vals[i];
  }
  return out;
}

CVec reconstruct_psi(const std::function<CVec(const PointSet&)>& w_at, const GwptParams& gwpt,
                     double eps, const PointSet& x_points)
{
  const Mat alpha_r = gwpt.alpha.real();
  const Mat xi = x_points.colwise() - gwpt.q;
  const PointSet eta = (gwpt.B * xi) / std::sqrt(eps);
  const CVec w = w_at(eta);
  CVec out(x_points.cols());
  for (Eigen::Index i = 0; i < x_points.cols(); ++i) {
    const auto x = xi.col(i);
    const cplx theta = x.dot(alpha_r * x) + gwpt.p.dot(x) + gwpt.gamma;
    out[i] = w[i] * std::exp(I * theta / eps);
  }
  return out;
}

double l2_error(const GridWaveFunction& a, const GridWaveFunction& b)
{
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw std::invalid_argument("l2_error: wave functions live on different grids");
  }
  return std::sqrt((a.values - b.values).squaredNorm() * a.grid.cell_volume());
}

ParameterState axpy(const ParameterState& y, double a, const ParameterState& k)
{
  return {axpy(y.gwpt, a, k.gwpt), axpy(y.hwp, a, k.hwp)};
}

ParameterState parameter_rhs(const ParameterState& s, const Potential& V, double eps)
{
  return {gwpt_rhs(s.gwpt, V, eps), hwp_rhs(s.hwp, s.gwpt.B * s.gwpt.B.transpose())};
}

long fine_steps_per_half(double dt_c, double dt_gt)
{
  if (!(dt_c > 0.0) || !(dt_gt > 0.0)) throw std::invalid_argument("time steps must be positive");
  const double ratio = dt_c / (2.0 * dt_gt);
  const long m = std::lround(ratio);
  if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio) {
    throw std::invalid_argument("dt_c must be an integer multiple of 2*dt_gt (dt_c/(2 dt_gt) = " +
                                std::to_string(ratio) + ")");
  }
  return m;
}

SimulationState::SimulationState(Potential V, const GaussianInitialDatum& datum,
                                 PropagatorSettings settings)
    : V_(std::move(V)), settings_(settings)
{
  validate(datum);
  const int d = datum.dim();
  if (V_.dim != d) throw std::invalid_argument("SimulationState: potential and datum dimensions differ");
  if (std::abs(datum.eps - settings_.eps) > 1e-15 * settings_.eps) {
    throw std::invalid_argument("SimulationState: datum eps differs from settings eps");
  }
  static_cast<void>(Epsilon(settings_.eps));
  if (settings_.quad_per_axis < 1) throw std::invalid_argument("quadrature size must be >= 1");
  fine_per_half_ = fine_steps_per_half(settings_.dt_c, settings_.dt_gt);

  K_ = std::make_shared<const MultiIndexSet>(d, settings_.n, settings_.index_norm);
  packet_rule_ =
      rescale_for_packet_products(tensor_rule(gauss_hermite_1d(settings_.quad_per_axis), d));

  params_.gwpt = init_gwpt(datum);
  params_.hwp = hwp_init_params(d);
  coeffs_ = hwp_init_coefficients(K_, settings_.eps);
  initial_norm_ = coeffs_.c.norm();
  if (settings_.record_trajectory) trajectory_.push_back(params_.gwpt);
  monitor_parameters();
}

GalerkinMatrix SimulationState::matrix_at(const ParameterState& s) const
{
  const BasisEvaluation basis = recurrence_eval(s.hwp, K_, packet_rule_.nodes, Envelope::stripped);
  const Vec U = residue_U(packet_rule_.nodes, s.gwpt.q, s.gwpt.B, settings_.eps, V_);
  GalerkinMatrix F = assemble_F(basis, std::span<const double>(U.data(), U.size()), packet_rule_);
  F.t = s.gwpt.t;
  return F;
}

GalerkinMatrix SimulationState::galerkin_matrix() const { return matrix_at(params_); }

void SimulationState::fine_steps(long count)
{
  const auto rhs = [this](const ParameterState& y) { return parameter_rhs(y, V_, settings_.eps); };
  for (long i = 0; i < count; ++i) {
    params_ = rk4_step(params_, rhs, settings_.dt_gt);
    ++fine_counter_;
    const double t = static_cast<double>(fine_counter_) * settings_.dt_gt;
    params_.gwpt.t = t;
    params_.hwp.t = t;
    update_branch(params_.hwp);
    monitor_parameters();
    if (settings_.record_trajectory) trajectory_.push_back(params_.gwpt);
  }
}

void SimulationState::monitor_parameters()
{
  const double t = params_.gwpt.t;
  const double symp = symplectic_residuals(params_.hwp).max();
  const GwptIdentityReport ids = check_identities(params_.gwpt, settings_.eps);
  diag_.symplectic = std::max(diag_.symplectic, symp);
  diag_.clean_lemma = std::max(diag_.clean_lemma, ids.clean_lemma_residual);
  diag_.alpha_bb = std::max(diag_.alpha_bb, ids.alpha_bb_residual);
  diag_.alpha_symmetry = std::max(diag_.alpha_symmetry, symmetry_residual(params_.gwpt));
  if (!(symp <= settings_.abort_threshold)) {
    throw InvariantViolation("symplectic", symp, settings_.abort_threshold, t);
  }
  if (!(ids.clean_lemma_residual <= settings_.abort_threshold)) {
    throw InvariantViolation("clean_lemma", ids.clean_lemma_residual, settings_.abort_threshold, t);
  }
}

void SimulationState::advance(double t_target)
{
  const double dt_c = settings_.dt_c;
  const double ratio = (t_target - time()) / dt_c;
  const long steps = std::lround(ratio);
  if (steps < 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("advance: target time is not reachable in whole dt_c steps");
  }

  for (long s = 0; s < steps; ++s) {
    auto t0 = Clock::now();
    if (!cached_start_matrix_) cached_start_matrix_ = matrix_at(params_).F;
    diag_.galerkin_seconds += seconds_since(t0);

    t0 = Clock::now();
    fine_steps(fine_per_half_);
    diag_.parameter_seconds += seconds_since(t0);

    t0 = Clock::now();
    const GalerkinMatrix mid = matrix_at(params_);
    diag_.galerkin_seconds += seconds_since(t0);

    t0 = Clock::now();
    fine_steps(fine_per_half_);
    diag_.parameter_seconds += seconds_since(t0);

    t0 = Clock::now();
    GalerkinMatrix end = matrix_at(params_);
    coeffs_.c = coeff_rk4_step(coeffs_.c, *cached_start_matrix_, mid.F, end.F, settings_.eps, dt_c);
    coeffs_.t = params_.gwpt.t;
    diag_.hermitian = std::max({diag_.hermitian, mid.hermiticity_residual, end.hermiticity_residual});
    cached_start_matrix_ = std::move(end.F);
    const double drift = std::abs(coeffs_.c.norm() - initial_norm_) / initial_norm_;
    diag_.norm_drift = std::max(diag_.norm_drift, drift);
    diag_.galerkin_seconds += seconds_since(t0);
  }
}

CVec SimulationState::w(const PointSet& eta) const { return reconstruct_w(coeffs_, params_.hwp, eta); }

CVec SimulationState::psi(const PointSet& x) const
{
  return reconstruct_psi([this](const PointSet& eta) { return w(eta); }, params_.gwpt,
                         settings_.eps, x);
}

GridWaveFunction SimulationState::psi_on(const PeriodicGrid& grid) const
{
  GridWaveFunction out;
  out.grid = grid;
  out.t = time();
  out.values = psi(grid.points());
  return out;
}

void write_coefficients_csv(std::ostream& os, const CoefficientVector& coeffs)
{
  const int d = coeffs.K->dim();
  os << "t";
  for (int j = 0; j < d; ++j) os << ",k" << j;
  os << ",re,im\n" << std::setprecision(17);
  for (std::size_t pos = 0; pos < coeffs.K->size(); ++pos) {
    os << coeffs.t;
    for (int j = 0; j < d; ++j) os << ',' << (*coeffs.K)[pos][j];
    os << ',' << coeffs.c[static_cast<Eigen::Index>(pos)].real() << ','
       << coeffs.c[static_cast<Eigen::Index>(pos)].imag() << '\n';
  }
}

}  // namespace gwpt
