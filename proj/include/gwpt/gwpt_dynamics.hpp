#pragma once

#include <iosfwd>
#include <vector>

#include "gwpt/potential.hpp"
#include "gwpt/types.hpp"

namespace gwpt {

/// Gaussian wave-packet transform parameters.
///
/// The wave function is represented as
///   psi(x, t) = w(eta, t) exp{(i/eps) (xi^T alpha_R xi + p^T xi + gamma)},
///   xi = x - q,  eta = B xi / sqrt(eps),
/// and the parameters follow the classical/Riccati system
///   q' = p,  p' = -grad V(q),  gamma' = p.p/2 - V(q) + i eps tr(alpha_R),
///   alpha' = -2 alpha^2 - Hess V(q) / 2,  B' = -2 B alpha_R.
/// Along exact trajectories Im(alpha) = B^T B and
/// det(Im alpha)^(1/4) = exp(-Im(gamma)/eps).
struct GwptParams {
  Vec q;
  Vec p;
  cplx gamma{0.0, 0.0};
  CMat alpha;
  Mat B;
  double t = 0.0;

  int dim() const { return static_cast<int>(q.size()); }
};

/// y + a * k over every field, including t.
GwptParams axpy(const GwptParams& y, double a, const GwptParams& k);

/// Normalised Gaussian initial datum
///   psi_0(x) = 2^(d/4) (pi eps)^(-d/4) exp{(i/eps)[xi^T alpha0 xi + p0^T xi + gamma0]}.
struct GaussianInitialDatum {
  Vec q0;
  Vec p0;
  CMat alpha0;
  double eps = 1.0;
  double gamma0_real = 0.0;

  int dim() const { return static_cast<int>(q0.size()); }
};

/// Throws std::invalid_argument when alpha0 is not symmetric or Im(alpha0) is not SPD.
void validate(const GaussianInitialDatum& datum);

/// Initial parameters: B = principal SPD root of Im(alpha0),
/// Im(gamma) = -(eps/4) ln det Im(alpha0).
GwptParams init_gwpt(const GaussianInitialDatum& datum);

/// Time derivative of the parameters; the returned t-field is 1.
GwptParams gwpt_rhs(const GwptParams& s, const Potential& V, double eps);

GwptParams rk4_step(const GwptParams& s, const Potential& V, double eps, double dt);

struct GwptIdentityReport {
  double alpha_bb_residual = 0.0;    ///< ||Im(alpha) - B^T B||_inf
  double clean_lemma_residual = 0.0; ///< |det(Im alpha)^(1/4) - exp(-Im(gamma)/eps)|
};

GwptIdentityReport check_identities(const GwptParams& s, double eps);

/// ||alpha - alpha^T||_inf.
double symmetry_residual(const GwptParams& s);

/// CSV: t, q_j, p_j, re_gamma, im_gamma, re_alpha_ij, im_alpha_ij, B_ij (row-major).
void write_trajectory_csv(std::ostream& os, const std::vector<GwptParams>& trajectory);

/// Presets used by the experiments.
GaussianInitialDatum example1_datum(double eps);
GaussianInitialDatum example2_datum(double eps);

}  // namespace gwpt
