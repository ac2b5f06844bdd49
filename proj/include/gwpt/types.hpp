#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gwpt {

using cplx = std::complex<double>;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Points are stored column-wise: a d x N matrix holds N points in R^d.
using PointSet = Eigen::MatrixXd;

inline constexpr cplx I{0.0, 1.0};

/// Rescaled Planck constant, 0 < eps <= 1.
class Epsilon {
 public:
  explicit Epsilon(double eps) : eps_(eps)
  {
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw std::invalid_argument("eps must lie in (0, 1], got " + std::to_string(eps));
    }
  }

  double value() const { return eps_; }
  operator double() const { return eps_; }

 private:
  double eps_;
};

/// Raised when a monitored invariant drifts past its abort threshold.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string name, double residual, double threshold, double t)
      : std::runtime_error("invariant '" + name + "' violated at t=" + std::to_string(t) +
                           ": residual " + std::to_string(residual) + " > " +
                           std::to_string(threshold)),
        name_(std::move(name)),
        residual_(residual)
  {
  }

  const std::string& name() const { return name_; }
  double residual() const { return residual_; }

 private:
  std::string name_;
  double residual_;
};

/// Max-row-sum norm, the induced infinity norm.
template <typename Derived>
double inf_norm(const Eigen::MatrixBase<Derived>& m)
{
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace gwpt
