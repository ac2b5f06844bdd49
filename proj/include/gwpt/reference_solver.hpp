#pragma once

#include <memory>
#include <string>

#include "gwpt/grid.hpp"
#include "gwpt/gwpt_dynamics.hpp"
#include "gwpt/potential.hpp"

namespace gwpt {

/// Samples the Gaussian datum on the grid (no periodic wrap of x - q0).
/// Records a warning when |psi| on the outermost grid layer exceeds 1e-12 of
/// the peak, since the periodic solver would then see wrap-around.
GridWaveFunction init_grid_gaussian(const PeriodicGrid& grid, const GaussianInitialDatum& datum);

enum class SplittingScheme {
  /// Chin's fourth-order forward scheme 4A:
  ///   e^{(h/6) V} e^{(h/2) T} e^{(2h/3) V~} e^{(h/2) T} e^{(h/6) V},
  /// with V~ = V - (h^2/48) |grad V|^2 for the real-time propagator
  /// exp(-(i/eps) h H), H = -(eps^2/2) Laplacian + V.
  chin4a,
  /// Yoshida triple jump of Strang splittings, weights
  /// w1 = 1/(2 - 2^(1/3)), w0 = -2^(1/3)/(2 - 2^(1/3)).
  yoshida4,
};

std::string to_string(SplittingScheme s);
SplittingScheme splitting_scheme_from_string(const std::string& s);

/// Fourier split-step propagator for i eps psi_t = -(eps^2/2) Laplacian psi + V psi
/// on a periodic grid. Phase tables for a fixed step are built once; stepping
/// only multiplies pointwise and transforms. A solver owns its FFT work buffer,
/// so one instance must not be stepped from two threads at once.
class SplitStepSolver {
 public:
  SplitStepSolver(const PeriodicGrid& grid, const Potential& V, double eps, double dt,
                  SplittingScheme scheme = SplittingScheme::chin4a);
  ~SplitStepSolver();
  SplitStepSolver(const SplitStepSolver&) = delete;
  SplitStepSolver& operator=(const SplitStepSolver&) = delete;

  void step(GridWaveFunction& psi) const;

  /// `count` consecutive steps; adjacent outer potential factors are fused.
  void propagate(GridWaveFunction& psi, long count) const;

  double dt() const { return dt_; }

 private:
  class Fft;

  void kinetic(const CVec& phase) const;

  PeriodicGrid grid_;
  double dt_;
  SplittingScheme scheme_;
  std::unique_ptr<Fft> fft_;

  // chin4a
  CVec outer_potential_;   // h/6
  CVec fused_potential_;   // h/3
  CVec middle_potential_;  // 2h/3 with gradient correction
  CVec half_kinetic_;      // h/2
  // yoshida4
  CVec strang_outer_half_v_;
  CVec strang_inner_half_v_;
  CVec strang_outer_kinetic_;
  CVec strang_inner_kinetic_;
};

/// One fourth-order step.
GridWaveFunction split_step_4(const GridWaveFunction& psi, const Potential& V, double eps, double dt,
                              SplittingScheme scheme = SplittingScheme::chin4a);

/// Grid and time step for a reference run: dx = 2 pi eps / points_per_wavelength_factor
/// on [-pi, pi)^d rounded up to a power of two, dt = eps / dt_factor.
struct ReferenceMeshing {
  double dx_factor = 64.0;
  double dt_factor = 64.0;

  static ReferenceMeshing defaults_for(int dim);
  PeriodicGrid grid(int dim, double eps) const;
  double dt(double eps) const { return eps / dt_factor; }
};

/// Propagates the datum to t_final with repeated split steps. t_final must be
/// an integer multiple of dt_ref; grids above 2^26 points are rejected.
GridWaveFunction propagate_reference(const GaussianInitialDatum& datum, const Potential& V,
                                     double eps, double t_final, double dt_ref,
                                     const PeriodicGrid& grid,
                                     SplittingScheme scheme = SplittingScheme::chin4a);

/// Binary snapshot: magic "GWPTREF1", dim, n, lower[], upper[], t, then
/// interleaved re/im doubles in grid order.
void save_snapshot(const std::string& path, const GridWaveFunction& psi);
GridWaveFunction load_snapshot(const std::string& path);

}  // namespace gwpt
