#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gwpt/grid.hpp"
#include "gwpt/gwpt_dynamics.hpp"
#include "gwpt/hagedorn.hpp"
#include "gwpt/multi_index.hpp"
#include "gwpt/potential.hpp"
#include "gwpt/quadrature.hpp"

namespace gwpt {

/// Residue potential U(eta; q) = eps^(-3/2) V_2(sqrt(eps) B^-1 eta; q) at each column of `eta`.
Vec residue_U(const PointSet& eta, const Vec& q, const Mat& B, double eps, const Potential& V);

/// Hermitian interaction matrix f_kl = <phi_k, U phi_l> over K.
struct GalerkinMatrix {
  std::shared_ptr<const MultiIndexSet> K;
  CMat F;
  double t = 0.0;
  /// ||F - F^*||_inf / ||F||_inf before symmetrisation.
  double hermiticity_residual = 0.0;
};

/// Assembles F from envelope-stripped packet values at the nodes of a
/// packet-product rule (see rescale_for_packet_products) and U at the same
/// nodes:  f_kl = sum_i w_i conj(s_k(eta_i)) U(eta_i) s_l(eta_i).
/// The result is symmetrised, F <- (F + F^*)/2.
GalerkinMatrix assemble_F(const BasisEvaluation& basis, std::span<const double> U,
                          const QuadratureRule& packet_rule);

/// One RK4 step of c' = -i sqrt(eps) F(t) c with F sampled at t, t + dt/2, t + dt.
CVec coeff_rk4_step(const CVec& c, const CMat& F_start, const CMat& F_mid, const CMat& F_end,
                    double eps, double dt);

/// Same step with F supplied by a time sampler.
CoefficientVector coeff_rk4_step(const CoefficientVector& c,
                                 const std::function<CMat(double)>& F_at, double eps, double dt);

/// w~(eta) = e^{i S} sum_k c_k phi_k(eta).
CVec reconstruct_w(const CoefficientVector& coeffs, const HagedornParams& hwp, const PointSet& points);

/// psi(x) = w~(eta) exp{(i/eps)(xi^T alpha_R xi + p^T xi + gamma)},  xi = x - q,  eta = B xi / sqrt(eps).
CVec reconstruct_psi(const std::function<CVec(const PointSet&)>& w_at, const GwptParams& gwpt,
                     double eps, const PointSet& x_points);

/// Absolute discrete L2 distance sqrt(sum |a - b|^2 dV) on a common grid.
double l2_error(const GridWaveFunction& a, const GridWaveFunction& b);

/// GWPT and Hagedorn parameters integrated as one system, so that every RK4
/// stage of the packet flow sees B B^T from the matching GWPT stage.
struct ParameterState {
  GwptParams gwpt;
  HagedornParams hwp;
};

ParameterState axpy(const ParameterState& y, double a, const ParameterState& k);
ParameterState parameter_rhs(const ParameterState& s, const Potential& V, double eps);

struct PropagatorSettings {
  double eps = 1.0 / 128;
  int n = 10;
  IndexNorm index_norm = IndexNorm::l1;
  int quad_per_axis = 15;
  double dt_c = 1.0 / 64;
  double dt_gt = 1.0 / 1024;
  /// Abort threshold for the symplectic and norm-identity monitors.
  double abort_threshold = 1e-6;
  /// Keep every fine-grid GWPT state (for trajectory dumps).
  bool record_trajectory = false;
};

/// Running maxima of the monitored invariants.
struct Diagnostics {
  double symplectic = 0.0;
  double clean_lemma = 0.0;
  double alpha_bb = 0.0;
  double alpha_symmetry = 0.0;
  double hermitian = 0.0;
  double norm_drift = 0.0;
  double parameter_seconds = 0.0;
  double galerkin_seconds = 0.0;
};

/// State of the two-rate scheme: GWPT/Hagedorn parameters on the fine step
/// dt_gt, Galerkin coefficients on the coarse step dt_c. dt_c must be an
/// integer multiple of 2 dt_gt so the RK4 stage times of the coefficient
/// update land on fine-grid samples.
class SimulationState {
 public:
  SimulationState(Potential V, const GaussianInitialDatum& datum, PropagatorSettings settings);

  /// Runs coarse steps until t_target, which must be t + m dt_c.
  /// Throws InvariantViolation when a monitor exceeds the abort threshold.
  void advance(double t_target);

  double time() const { return coeffs_.t; }
  double eps() const { return settings_.eps; }
  const PropagatorSettings& settings() const { return settings_; }
  const Potential& potential() const { return V_; }
  const GwptParams& gwpt() const { return params_.gwpt; }
  const HagedornParams& hwp() const { return params_.hwp; }
  const CoefficientVector& coeffs() const { return coeffs_; }
  const std::shared_ptr<const MultiIndexSet>& index_set() const { return K_; }
  const QuadratureRule& packet_rule() const { return packet_rule_; }
  const Diagnostics& diagnostics() const { return diag_; }
  const std::vector<GwptParams>& trajectory() const { return trajectory_; }

  /// Galerkin matrix for the current parameters.
  GalerkinMatrix galerkin_matrix() const;

  CVec w(const PointSet& eta) const;
  CVec psi(const PointSet& x) const;
  GridWaveFunction psi_on(const PeriodicGrid& grid) const;

 private:
  GalerkinMatrix matrix_at(const ParameterState& s) const;
  void fine_steps(long count);
  void monitor_parameters();

  Potential V_;
  PropagatorSettings settings_;
  std::shared_ptr<const MultiIndexSet> K_;
  QuadratureRule packet_rule_;
  long fine_per_half_ = 1;
  long fine_counter_ = 0;
  ParameterState params_;
  CoefficientVector coeffs_;
  double initial_norm_ = 0.0;
  Diagnostics diag_;
  std::vector<GwptParams> trajectory_;
  std::optional<CMat> cached_start_matrix_;
};

/// Validates dt_c = m * 2 * dt_gt for a positive integer m and returns m.
long fine_steps_per_half(double dt_c, double dt_gt);

/// CSV snapshot of the coefficients: t, k..., re, im (one row per index).
void write_coefficients_csv(std::ostream& os, const CoefficientVector& coeffs);

}  // namespace gwpt
