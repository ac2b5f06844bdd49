#pragma once

#include <span>

#include "gwpt/types.hpp"

namespace gwpt {

/// Gauss-Hermite rule for the weight exp(-|x|^2) on R^d.
///
/// `nodes` is d x N (one column per node); `weights` has N positive entries
/// summing to pi^(d/2).
struct QuadratureRule {
  int dim = 1;
  PointSet nodes;
  Vec weights;

  std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

/// N-point physicists' Gauss-Hermite rule, 1 <= N <= 200.
///
/// Nodes come from the Golub-Welsch eigenproblem of the Jacobi matrix and are
/// then polished by Newton iteration on the orthonormal Hermite recurrence.
/// Weights are the Christoffel numbers 1 / sum_k p_k(x_i)^2. The rule is
/// symmetrised so that node i and node N-1-i are exact negatives.
QuadratureRule gauss_hermite_1d(int n);

/// Cartesian power of a 1-D rule. The first coordinate varies slowest.
/// Rejects rules with more than 1e7 nodes.
QuadratureRule tensor_rule(const QuadratureRule& rule1d, int dim);

/// Sum_i w_i f_i. `values` are f at the nodes, without the Gaussian weight.
cplx integrate(const QuadratureRule& rule, std::span<const cplx> values);
double integrate(const QuadratureRule& rule, std::span<const double> values);

/// Maps a rule for exp(-|x|^2) onto one for exp(-2|eta|^2):
/// eta_i = x_i / sqrt(2), w_i -> w_i 2^(-d/2).
///
/// Hagedorn packets on the transformed trajectory carry the envelope
/// exp(-|eta|^2), so products of two of them integrate against exp(-2|eta|^2).
QuadratureRule rescale_for_packet_products(const QuadratureRule& rule);

/// Values of the orthonormal Hermite polynomials p_0..p_n at x, where
/// int p_k p_l exp(-x^2) dx = delta_kl.
Vec orthonormal_hermite(int n, double x);

}  // namespace gwpt
