#include "gwpt/hagedorn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

namespace gwpt {

HagedornParams axpy(const HagedornParams& y, double a, const HagedornParams& k)
{
  HagedornParams out;
  out.q = y.q + a * k.q;
  out.p = y.p + a * k.p;
  out.Q = y.Q + a * k.Q;
  out.P = y.P + a * k.P;
  out.S = y.S + a * k.S;
  out.t = y.t + a * k.t;
  out.det_arg = y.det_arg;
  return out;
}

void update_branch(HagedornParams& h)
{
  const double principal = std::arg(h.Q.determinant());
  double delta = principal - h.det_arg;
  delta -= 2.0 * std::numbers::pi * std::round(delta / (2.0 * std::numbers::pi));
  h.det_arg += delta;
}

cplx sqrt_det_Q(const HagedornParams& h)
{
  const double modulus = std::abs(h.Q.determinant());
  return std::polar(std::sqrt(modulus), 0.5 * h.det_arg);
}

HagedornParams hwp_init_params(int dim)
{
  HagedornParams h;
  h.q = Vec::Zero(dim);
  h.p = Vec::Zero(dim);
  h.Q = CMat::Identity(dim, dim) / std::sqrt(2.0);
  h.P = std::sqrt(2.0) * I * CMat::Identity(dim, dim);
  h.S = 0.0;
  h.t = 0.0;
  h.det_arg = 0.0;
  return h;
}

CoefficientVector hwp_init_coefficients(std::shared_ptr<const MultiIndexSet> K, double eps)
{
  CoefficientVector cv;
  cv.c = CVec::Zero(static_cast<Eigen::Index>(K->size()));
  cv.c[0] = std::pow(eps, -0.25 * K->dim());
  cv.K = std::move(K);
  cv.t = 0.0;
  return cv;
}

HagedornParams hwp_rhs(const HagedornParams& h, const Mat& BBt)
{
  const CMat M = BBt.cast<cplx>();
  HagedornParams r;
  r.q = BBt * h.p;
  r.p = -4.0 * BBt * h.q;
  r.Q = M * h.P;
  r.P = -4.0 * M * h.Q;
  r.S = 0.5 * h.p.dot(BBt * h.p) - 2.0 * h.q.dot(BBt * h.q);
  r.t = 1.0;
  r.det_arg = 0.0;
  return r;
}

SymplecticResiduals symplectic_residuals(const HagedornParams& h)
{
  const int d = h.dim();
  SymplecticResiduals r;
  r.transpose_relation = inf_norm(h.Q.transpose() * h.P - h.P.transpose() * h.Q);
  r.adjoint_relation =
      inf_norm(h.Q.adjoint() * h.P - h.P.adjoint() * h.Q - 2.0 * I * CMat::Identity(d, d));
  return r;
}

namespace {

Eigen::PartialPivLU<CMat> factor_Q(const HagedornParams& h)
{
  Eigen::PartialPivLU<CMat> lu(h.Q);
  const double scale = std::pow(h.Q.cwiseAbs().maxCoeff(), h.dim());
  if (!(std::abs(lu.determinant()) > 1e-14 * scale)) {
    throw std::runtime_error("Hagedorn parameters: det Q is numerically zero");
  }
  return lu;
}

// Ground packet values with an optional exp(+|y|^2) factor folded into the exponent.
CVec ground_values(const HagedornParams& h, const Eigen::PartialPivLU<CMat>& lu,
                   const PointSet& points, Envelope envelope)
{
  const int d = h.dim();
  // P Q^-1, symmetric when the relations hold.
  CMat M = h.P * lu.inverse();
  M = 0.5 * (M + M.transpose()).eval();
  if (envelope == Envelope::stripped) M -= 2.0 * I * CMat::Identity(d, d);

  const cplx prefactor = std::pow(std::numbers::pi, -0.25 * d) / sqrt_det_Q(h);
  const auto npts = points.cols();
  CVec out(npts);
  for (Eigen::Index i = 0; i < npts; ++i) {
    const Vec y = points.col(i) - h.q;
    const CVec yc = y.cast<cplx>();
    const cplx quad = yc.dot(M * yc);  // dot conjugates the first argument, y is real
    out[i] = prefactor * std::exp(0.5 * I * quad + I * h.p.dot(y));
  }
  return out;
}

}  // namespace

CVec phi0_eval(const HagedornParams& h, const PointSet& points)
{
  if (points.rows() != h.dim()) throw std::invalid_argument("phi0_eval: point dimension mismatch");
  return ground_values(h, factor_Q(h), points, Envelope::full);
}

BasisEvaluation recurrence_eval(const HagedornParams& h, std::shared_ptr<const MultiIndexSet> K,
                                const PointSet& points, Envelope envelope)
{
  const int d = h.dim();
  if (points.rows() != d || K->dim() != d) {
    throw std::invalid_argument("recurrence_eval: dimension mismatch");
  }
  const auto lu = factor_Q(h);
  const CMat Qinv = lu.inverse();
  const CMat C = Qinv * h.Q.conjugate();
  const auto npts = points.cols();
  const auto nk = static_cast<Eigen::Index>(K->size());

  // a(j, i) = sqrt(2) (Q^-1 (x_i - q))_j
  const CMat a = std::sqrt(2.0) * Qinv * (points.colwise() - h.q).cast<cplx>();

  BasisEvaluation out;
  out.points = points;
  out.envelope = envelope;
  out.values.resize(nk, npts);
  out.values.row(0) = ground_values(h, lu, points, envelope).transpose();

  for (Eigen::Index pos = 1; pos < nk; ++pos) {
    const MultiIndex& k = (*K)[pos];
    int j = d - 1;
    while (k[j] == 0) --j;
    const std::size_t m = K->lower(pos, j);
    if (m == MultiIndexSet::npos) {
      throw std::invalid_argument("recurrence_eval: index set is not closed under decrement");
    }
    const MultiIndex& km = (*K)[m];
    auto row = out.values.row(pos);
    row = a.row(j).cwiseProduct(out.values.row(m));
    for (int r = 0; r < d; ++r) {
      if (km[r] == 0) continue;
      const std::size_t mm = K->lower(m, r);
      row -= (C(j, r) * std::sqrt(static_cast<double>(km[r]))) * out.values.row(mm);
    }
    row /= std::sqrt(static_cast<double>(k[j]));
  }
  out.K = std::move(K);
  return out;
}

CVec ladder_apply(const MultiIndexSet& K, Ladder direction, int j, const CVec& c)
{
  if (static_cast<std::size_t>(c.size()) != K.size()) {
    throw std::invalid_argument("ladder_apply: coefficient length does not match K");
  }
  CVec out = CVec::Zero(c.size());
  for (std::size_t pos = 0; pos < K.size(); ++pos) {
    const double kj = K[pos][j];
    if (direction == Ladder::raise) {
      if (c[pos] == cplx(0.0)) continue;
      const std::size_t up = K.raise(pos, j);
      if (up == MultiIndexSet::npos) {
        throw std::out_of_range("ladder_apply: raising leaves the index set");
      }
      out[up] += std::sqrt(kj + 1.0) * c[pos];
    } else {
      if (kj == 0.0) continue;
      out[K.lower(pos, j)] += std::sqrt(kj) * c[pos];
    }
  }
  return out;
}

CVec position_apply(const HagedornParams& h, const MultiIndexSet& K, int m, const CVec& c)
{
  CVec out = h.q[m] * c;
  for (int j = 0; j < h.dim(); ++j) {
    out += (h.Q(m, j) / std::sqrt(2.0)) * ladder_apply(K, Ladder::raise, j, c);
    out += (std::conj(h.Q(m, j)) / std::sqrt(2.0)) * ladder_apply(K, Ladder::lower, j, c);
  }
  return out;
}

CVec momentum_apply(const HagedornParams& h, const MultiIndexSet& K, int m, const CVec& c)
{
  CVec out = h.p[m] * c;
  for (int j = 0; j < h.dim(); ++j) {
    out += (h.P(m, j) / std::sqrt(2.0)) * ladder_apply(K, Ladder::raise, j, c);
    out += (std::conj(h.P(m, j)) / std::sqrt(2.0)) * ladder_apply(K, Ladder::lower, j, c);
  }
  return out;
}

double quadratic_eigencheck_1d(const HagedornParams& h, double alpha_i, int k,
                               const QuadratureRule& rule, double eigenvalue_scale)
{
  if (h.dim() != 1 || rule.dim != 1) {
    throw std::invalid_argument("quadratic_eigencheck_1d: one-dimensional parameters required");
  }
  auto K = std::make_shared<const MultiIndexSet>(1, k + 2, IndexNorm::linf);
  CVec c = CVec::Zero(static_cast<Eigen::Index>(K->size()));
  c[k] = 1.0;

  const CVec x2 = position_apply(h, *K, 0, position_apply(h, *K, 0, c));
  const CVec p2 = momentum_apply(h, *K, 0, momentum_apply(h, *K, 0, c));
  const double lambda = eigenvalue_scale * alpha_i * (2.0 * k + 1.0);
  const CVec r = 0.5 * alpha_i * p2 + 2.0 * alpha_i * x2 - lambda * c;

  const QuadratureRule packet_rule = rescale_for_packet_products(rule);
  const BasisEvaluation basis = recurrence_eval(h, K, packet_rule.nodes, Envelope::stripped);
  const CVec r_nodes = basis.values.transpose() * r;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r_nodes.size(); ++i) acc += packet_rule.weights[i] * std::norm(r_nodes[i]);
  return std::sqrt(acc);
}

}  // namespace gwpt
