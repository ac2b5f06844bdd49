#include "gwpt/gwpt_dynamics.hpp"

#include <cmath>
#include <limits>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gwpt/rk4.hpp"

namespace gwpt {

GwptParams axpy(const GwptParams& y, double a, const GwptParams& k)
{
  GwptParams out;
  out.q = y.q + a * k.q;
  out.p = y.p + a * k.p;
  out.gamma = y.gamma + a * k.gamma;
  out.alpha = y.alpha + a * k.alpha;
  out.B = y.B + a * k.B;
  out.t = y.t + a * k.t;
  return out;
}

void validate(const GaussianInitialDatum& datum)
{
  const int d = datum.dim();
  if (d < 1 || datum.p0.size() != d || datum.alpha0.rows() != d || datum.alpha0.cols() != d) {
    throw std::invalid_argument("GaussianInitialDatum: inconsistent dimensions");
  }
  if (!(datum.eps > 0.0 && datum.eps <= 1.0)) {
    throw std::invalid_argument("GaussianInitialDatum: eps must lie in (0, 1]");
  }
  const double scale = std::max(1.0, inf_norm(datum.alpha0));
  if (inf_norm(datum.alpha0 - datum.alpha0.transpose()) > 1e-14 * scale) {
    throw std::invalid_argument("GaussianInitialDatum: alpha0 is not symmetric");
  }
  const Mat alpha_i = datum.alpha0.imag();
  Eigen::LLT<Mat> llt(0.5 * (alpha_i + alpha_i.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("GaussianInitialDatum: Im(alpha0) is not positive definite");
  }
}

GwptParams init_gwpt(const GaussianInitialDatum& datum)
{
  validate(datum);
  const Mat alpha_i = 0.5 * (datum.alpha0.imag() + datum.alpha0.imag().transpose());

  Eigen::SelfAdjointEigenSolver<Mat> eig(alpha_i);
  GwptParams s;
  s.q = datum.q0;
  s.p = datum.p0;
  s.alpha = datum.alpha0;
  s.B = eig.operatorSqrt();
  const double log_det = eig.eigenvalues().array().log().sum();
  s.gamma = cplx(datum.gamma0_real, -0.25 * datum.eps * log_det);
  s.t = 0.0;
  return s;
}

GwptParams gwpt_rhs(const GwptParams& s, const Potential& V, double eps)
{
  const Mat alpha_r = s.alpha.real();
  GwptParams r;
  r.q = s.p;
  r.p = -V.gradient(s.q);
  r.gamma = cplx(0.5 * s.p.squaredNorm() - V.value(s.q), eps * alpha_r.trace());
  r.alpha = -2.0 * s.alpha * s.alpha - 0.5 * V.hessian(s.q).cast<cplx>();
  r.B = -2.0 * s.B * alpha_r;
  r.t = 1.0;
  return r;
}

GwptParams rk4_step(const GwptParams& s, const Potential& V, double eps, double dt)
{
  return rk4_step(s, [&](const GwptParams& y) { return gwpt_rhs(y, V, eps); }, dt);
}

GwptIdentityReport check_identities(const GwptParams& s, double eps)
{
  const Mat alpha_i = s.alpha.imag();
  GwptIdentityReport rep;
  rep.alpha_bb_residual = inf_norm(alpha_i - s.B.transpose() * s.B);
  const double det = alpha_i.determinant();
  rep.clean_lemma_residual =
      std::abs(std::pow(std::abs(det), 0.25) - std::exp(-s.gamma.imag() / eps));
  if (det <= 0.0) rep.clean_lemma_residual = std::numeric_limits<double>::infinity();
  return rep;
}

double symmetry_residual(const GwptParams& s) { return inf_norm(s.alpha - s.alpha.transpose()); }

void write_trajectory_csv(std::ostream& os, const std::vector<GwptParams>& trajectory)
{
  if (trajectory.empty()) return;
  const int d = trajectory.front().dim();
  os << "t";
  for (int j = 0; j < d; ++j) os << ",q" << j;
  for (int j = 0; j < d; ++j) os << ",p" << j;
  os << ",re_gamma,im_gamma";
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) os << ",re_alpha" << i << j << ",im_alpha" << i << j;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) os << ",B" << i << j;
  os << '\n';

  os << std::setprecision(17);
  for (const auto& s : trajectory) {
    os << s.t;
    for (int j = 0; j < d; ++j) os << ',' << s.q[j];
    for (int j = 0; j < d; ++j) os << ',' << s.p[j];
    os << ',' << s.gamma.real() << ',' << s.gamma.imag();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) os << ',' << s.alpha(i, j).real() << ',' << s.alpha(i, j).imag();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) os << ',' << s.B(i, j);
    os << '\n';
  }
}

GaussianInitialDatum example1_datum(double eps)
{
  GaussianInitialDatum d;
  d.q0 = Vec::Constant(1, std::numbers::pi / 2);
  d.p0 = Vec::Zero(1);
  d.alpha0 = CMat::Constant(1, 1, I);
  d.eps = eps;
  return d;
}

GaussianInitialDatum example2_datum(double eps)
{
  GaussianInitialDatum d;
  d.q0 = Vec(2);
  d.q0 << std::numbers::pi / 2, std::numbers::pi / 3;
  d.p0 = Vec::Zero(2);
  d.alpha0 = I * CMat::Identity(2, 2);
  d.eps = eps;
  return d;
}

}  // namespace gwpt
