#pragma once

#include <memory>

#include "gwpt/multi_index.hpp"
#include "gwpt/quadrature.hpp"
#include "gwpt/types.hpp"

namespace gwpt {

/// Hagedorn packet parameters with semiclassical scale delta = 1.
///
/// Q and P satisfy Q^T P - P^T Q = 0 and Q^* P - P^* Q = 2i I. `det_arg` is a
/// continuous argument of det Q, carried across time steps so that
/// (det Q)^(-1/2) in the ground packet does not jump when det Q winds around
/// the origin.
struct HagedornParams {
  Vec q;
  Vec p;
  CMat Q;
  CMat P;
  double S = 0.0;
  double t = 0.0;
  double det_arg = 0.0;

  int dim() const { return static_cast<int>(q.size()); }
};

/// y + a * k for the differential fields; det_arg is copied from y.
HagedornParams axpy(const HagedornParams& y, double a, const HagedornParams& k);

/// Re-anchors det_arg to the current det Q, choosing the branch nearest the
/// previous value. Call after each completed time step.
void update_branch(HagedornParams& h);

/// sqrt(det Q) on the branch recorded in det_arg.
cplx sqrt_det_Q(const HagedornParams& h);

/// Expansion coefficients over a multi-index set.
struct CoefficientVector {
  std::shared_ptr<const MultiIndexSet> K;
  CVec c;
  double t = 0.0;
};

/// q = p = 0, Q = I/sqrt(2), P = sqrt(2) i I, S = 0.
HagedornParams hwp_init_params(int dim);

/// c_0 = eps^(-d/4), all other coefficients zero.
CoefficientVector hwp_init_coefficients(std::shared_ptr<const MultiIndexSet> K, double eps);

/// Quadratic flow driven by M = B B^T:
///   q' = M p,  p' = -4 M q,  Q' = M P,  P' = -4 M Q,  S' = p^T M p / 2 - 2 q^T M q.
/// The returned t-field is 1.
HagedornParams hwp_rhs(const HagedornParams& h, const Mat& BBt);

struct SymplecticResiduals {
  double transpose_relation = 0.0; ///< ||Q^T P - P^T Q||_inf
  double adjoint_relation = 0.0;   ///< ||Q^* P - P^* Q - 2i I||_inf
  double max() const { return std::max(transpose_relation, adjoint_relation); }
};

SymplecticResiduals symplectic_residuals(const HagedornParams& h);

/// Ground packet
///   phi_0(x) = pi^(-d/4) (det Q)^(-1/2) exp{ (i/2) y^T P Q^-1 y + i p^T y },  y = x - q.
CVec phi0_eval(const HagedornParams& h, const PointSet& points);

enum class Envelope {
  /// Plain packet values phi_k(x).
  full,
  /// phi_k(x) exp(+|x - q|^2). On the transformed trajectory P Q^-1 = 2i I, so
  /// these are polynomials and carry no Gaussian decay.
  stripped,
};

/// Packet values on a set of points: row k holds phi_k at every point,
/// rows in the order of K.
struct BasisEvaluation {
  std::shared_ptr<const MultiIndexSet> K;
  PointSet points;
  CMat values;
  Envelope envelope = Envelope::full;
};

/// Evaluates all phi_k, k in K, by the three-term recurrence
///   Q (sqrt(k_j+1) phi_{k+e_j})_j = sqrt(2) (x - q) phi_k - conj(Q) (sqrt(k_j) phi_{k-e_j})_j.
/// Q is factorised once per call. K must be closed under decrement.
BasisEvaluation recurrence_eval(const HagedornParams& h, std::shared_ptr<const MultiIndexSet> K,
                                const PointSet& points, Envelope envelope = Envelope::full);

enum class Ladder { raise, lower };

/// Coefficient-space action of A_j^dagger (raise) or A_j (lower):
///   (A^dagger c)_k = sqrt(k_j) c_{k-e_j},  (A c)_k = sqrt(k_j+1) c_{k+e_j}.
/// Throws std::out_of_range if a non-zero coefficient would be raised out of K.
CVec ladder_apply(const MultiIndexSet& K, Ladder direction, int j, const CVec& c);

/// Coefficients of x_m u given those of u, via x - q = (Q A^dagger + conj(Q) A) / sqrt(2).
CVec position_apply(const HagedornParams& h, const MultiIndexSet& K, int m, const CVec& c);

/// Coefficients of (-i d/dx_m) u, via p_hat - p = (P A^dagger + conj(P) A) / sqrt(2).
CVec momentum_apply(const HagedornParams& h, const MultiIndexSet& K, int m, const CVec& c);

/// L2 norm of (H_q - alpha_I (2k+1)) phi_k in one dimension, where
/// H_q = -(alpha_I/2) d^2/deta^2 + 2 alpha_I eta^2. The operator is applied in
/// coefficient space through the ladder representation and the residual is
/// integrated with `rule` (a standard Gauss-Hermite rule, rescaled internally).
double quadratic_eigencheck_1d(const HagedornParams& h, double alpha_i, int k,
                               const QuadratureRule& rule, double eigenvalue_scale = 1.0);

}  // namespace gwpt
