#include "gwpt/reference_solver.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

namespace gwpt {

// ---------------------------------------------------------------------------
// PeriodicGrid / GridWaveFunction

PeriodicGrid::PeriodicGrid(int dim_, double lo, double hi, int n)
    : dim(dim_), lower(Vec::Constant(dim_, lo)), upper(Vec::Constant(dim_, hi)), points_per_axis(n)
{
  if (dim_ < 1) throw std::invalid_argument("PeriodicGrid: dim must be >= 1");
  if (!(hi > lo)) throw std::invalid_argument("PeriodicGrid: empty interval");
  if (n < 8 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("PeriodicGrid: points per axis must be a power of two >= 8, got " +
                                std::to_string(n));
  }
}

double PeriodicGrid::cell_volume() const
{
  double v = 1.0;
  for (int j = 0; j < dim; ++j) v *= spacing(j);
  return v;
}

std::size_t PeriodicGrid::total_points() const
{
  std::size_t n = 1;
  for (int j = 0; j < dim; ++j) n *= static_cast<std::size_t>(points_per_axis);
  return n;
}

PointSet PeriodicGrid::points() const
{
  const auto total = static_cast<Eigen::Index>(total_points());
  PointSet pts(dim, total);
  std::vector<int> digit(dim, 0);
  for (Eigen::Index i = 0; i < total; ++i) {
    for (int j = 0; j < dim; ++j) pts(j, i) = lower[j] + digit[j] * spacing(j);
    for (int j = dim - 1; j >= 0; --j) {
      if (++digit[j] < points_per_axis) break;
      digit[j] = 0;
    }
  }
  return pts;
}

Vec PeriodicGrid::wavenumbers(int axis) const
{
  const int n = points_per_axis;
  const double scale = 2.0 * std::numbers::pi / (upper[axis] - lower[axis]);
  Vec k(n);
  for (int i = 0; i < n; ++i) k[i] = scale * (i < n / 2 ? i : i - n);
  return k;
}

bool PeriodicGrid::operator==(const PeriodicGrid& other) const
{
  return dim == other.dim && points_per_axis == other.points_per_axis && lower == other.lower &&
         upper == other.upper;
}

double GridWaveFunction::norm() const
{
  return std::sqrt(values.squaredNorm() * grid.cell_volume());
}

// ---------------------------------------------------------------------------
// Initial data

GridWaveFunction init_grid_gaussian(const PeriodicGrid& grid, const GaussianInitialDatum& datum)
{
  validate(datum);
  if (datum.dim() != grid.dim) throw std::invalid_argument("init_grid_gaussian: dimension mismatch");
  const GwptParams s0 = init_gwpt(datum);
  const double eps = datum.eps;
  const int d = grid.dim;
  const double prefactor = std::pow(2.0, 0.25 * d) * std::pow(std::numbers::pi * eps, -0.25 * d);

  const PointSet pts = grid.points();
  GridWaveFunction psi;
  psi.grid = grid;
  psi.t = 0.0;
  psi.values.resize(pts.cols());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const Vec xi = pts.col(i) - datum.q0;
    const CVec xc = xi.cast<cplx>();
    const cplx phase = xc.dot(datum.alpha0 * xc) + datum.p0.dot(xi) + s0.gamma;
    psi.values[i] = prefactor * std::exp(I * phase / eps);
  }

  // Outermost layer along each axis: index 0 and n-1.
  const double peak = psi.values.cwiseAbs().maxCoeff();
  double edge = 0.0;
  const int n = grid.points_per_axis;
  std::vector<int> digit(d, 0);
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    bool on_edge = false;
    for (int j = 0; j < d; ++j) on_edge = on_edge || digit[j] == 0 || digit[j] == n - 1;
    if (on_edge) edge = std::max(edge, std::abs(psi.values[i]));
    for (int j = d - 1; j >= 0; --j) {
      if (++digit[j] < n) break;
      digit[j] = 0;
    }
  }
  if (edge > 1e-12 * peak) {
    std::ostringstream msg;
    msg << "initial datum not supported inside the periodic box: |psi| at the boundary is "
        << edge / peak << " of the peak";
    psi.warnings.push_back(msg.str());
  }
  return psi;
}

// ---------------------------------------------------------------------------
// FFT

// Plans and transforms live on one FFTW-allocated buffer, so the SIMD codelets
// are always usable and results do not depend on where Eigen put psi.
// Unaligned plans roughly quintuple the round-off drift of the norm.
class SplitStepSolver::Fft {
 public:
  explicit Fft(const PeriodicGrid& grid) : total_(grid.total_points())
  {
    std::vector<int> dims(grid.dim, grid.points_per_axis);
    buf_ = fftw_alloc_complex(total_);
    if (!buf_) throw std::bad_alloc();
    forward_ = fftw_plan_dft(grid.dim, dims.data(), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(grid.dim, dims.data(), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) {
      release();
      throw std::runtime_error("FFTW planning failed");
    }
  }
  ~Fft() { release(); }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  Eigen::Map<CVec> work()
  {
    return {reinterpret_cast<cplx*>(buf_), static_cast<Eigen::Index>(total_)};
  }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  void release()
  {
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
    if (buf_) fftw_free(buf_);
  }

  std::size_t total_;
  fftw_complex* buf_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// ---------------------------------------------------------------------------
// Split-step solver

std::string to_string(SplittingScheme s) { return s == SplittingScheme::chin4a ? "chin4a" : "yoshida4"; }

SplittingScheme splitting_scheme_from_string(const std::string& s)
{
  if (s == "chin4a" || s == "sp4") return SplittingScheme::chin4a;
  if (s == "yoshida4") return SplittingScheme::yoshida4;
  throw std::invalid_argument("unknown splitting scheme '" + s + "'");
}

namespace {

// exp(i theta) with cos and sin nudged by at most one ulp so that
// |z|^2 - 1 is as small as doubles allow. The rounding bias of plain
// std::polar is correlated where V is smooth and shows up as norm drift.
cplx unimodular(double theta)
{
  const double c0 = std::cos(theta), s0 = std::sin(theta);
  double best_c = c0, best_s = s0;
  long double best = std::abs(static_cast<long double>(c0) * c0 + static_cast<long double>(s0) * s0 - 1.0L);
  for (double c : {std::nextafter(c0, -2.0), c0, std::nextafter(c0, 2.0)}) {
    for (double s : {std::nextafter(s0, -2.0), s0, std::nextafter(s0, 2.0)}) {
      const long double r = std::abs(static_cast<long double>(c) * c + static_cast<long double>(s) * s - 1.0L);
      if (r < best) {
        best = r;
        best_c = c;
        best_s = s;
      }
    }
  }
  return {best_c, best_s};
}

// exp(-i eps |k|^2 h / 2) / N, with the inverse-FFT normalisation folded in.
CVec kinetic_phase(const PeriodicGrid& grid, double eps, double h)
{
  const auto total = static_cast<Eigen::Index>(grid.total_points());
  const double inv_n = 1.0 / static_cast<double>(total);
  std::vector<Vec> k(grid.dim);
  for (int j = 0; j < grid.dim; ++j) k[j] = grid.wavenumbers(j);
  CVec out(total);
  std::vector<int> digit(grid.dim, 0);
  for (Eigen::Index i = 0; i < total; ++i) {
    double k2 = 0.0;
    for (int j = 0; j < grid.dim; ++j) k2 += k[j][digit[j]] * k[j][digit[j]];
    out[i] = inv_n * unimodular(-0.5 * eps * k2 * h);
    for (int j = grid.dim - 1; j >= 0; --j) {
      if (++digit[j] < grid.points_per_axis) break;
      digit[j] = 0;
    }
  }
  return out;
}

CVec potential_phase(const Vec& v, double eps, double h)
{
  CVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = unimodular(-v[i] * h / eps);
  return out;
}

}  // namespace

SplitStepSolver::SplitStepSolver(const PeriodicGrid& grid, const Potential& V, double eps, double dt,
                                 SplittingScheme scheme)
    : grid_(grid), dt_(dt), scheme_(scheme), fft_(std::make_unique<Fft>(grid))
{
  if (!(dt > 0.0)) throw std::invalid_argument("SplitStepSolver: dt must be positive");
  if (V.dim != grid.dim) throw std::invalid_argument("SplitStepSolver: potential dimension mismatch");

  const PointSet pts = grid.points();
  Vec v(pts.cols());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) v[i] = V.value(pts.col(i));

  if (scheme == SplittingScheme::chin4a) {
    Vec v_corrected(pts.cols());
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      v_corrected[i] = v[i] - (dt * dt / 48.0) * V.gradient(pts.col(i)).squaredNorm();
    }
    outer_potential_ = potential_phase(v, eps, dt / 6.0);
    fused_potential_ = potential_phase(v, eps, dt / 3.0);
    middle_potential_ = potential_phase(v_corrected, eps, 2.0 * dt / 3.0);
    half_kinetic_ = kinetic_phase(grid, eps, 0.5 * dt);
  } else {
    const double cbrt2 = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cbrt2);
    const double w0 = -cbrt2 / (2.0 - cbrt2);
    strang_outer_half_v_ = potential_phase(v, eps, 0.5 * w1 * dt);
    strang_inner_half_v_ = potential_phase(v, eps, 0.5 * (w1 + w0) * dt);
    strang_outer_kinetic_ = kinetic_phase(grid, eps, w1 * dt);
    strang_inner_kinetic_ = kinetic_phase(grid, eps, w0 * dt);
  }
}

SplitStepSolver::~SplitStepSolver() = default;

void SplitStepSolver::kinetic(const CVec& phase) const
{
  fft_->forward();
  fft_->work().array() *= phase.array();
  fft_->backward();
}

void SplitStepSolver::step(GridWaveFunction& psi) const { propagate(psi, 1); }

void SplitStepSolver::propagate(GridWaveFunction& psi, long count) const
{
  if (!(psi.grid == grid_)) throw std::invalid_argument("SplitStepSolver: grid mismatch");
  if (count <= 0) return;
  Eigen::Map<CVec> u = fft_->work();
  u = psi.values;
  if (scheme_ == SplittingScheme::chin4a) {
    u.array() *= outer_potential_.array();
    for (long s = 0; s < count; ++s) {
      kinetic(half_kinetic_);
      u.array() *= middle_potential_.array();
      kinetic(half_kinetic_);
      u.array() *= (s + 1 < count ? fused_potential_ : outer_potential_).array();
    }
  } else {
    for (long s = 0; s < count; ++s) {
      u.array() *= strang_outer_half_v_.array();
      kinetic(strang_outer_kinetic_);
      u.array() *= strang_inner_half_v_.array();
      kinetic(strang_inner_kinetic_);
      u.array() *= strang_inner_half_v_.array();
      kinetic(strang_outer_kinetic_);
      u.array() *= strang_outer_half_v_.array();
    }
  }
  psi.values = u;
  psi.t += static_cast<double>(count) * dt_;
}

GridWaveFunction split_step_4(const GridWaveFunction& psi, const Potential& V, double eps, double dt,
                              SplittingScheme scheme)
{
  SplitStepSolver solver(psi.grid, V, eps, dt, scheme);
  GridWaveFunction out = psi;
  solver.step(out);
  return out;
}

// ---------------------------------------------------------------------------
// Reference runs

ReferenceMeshing ReferenceMeshing::defaults_for(int dim)
{
  if (dim == 1) return {64.0, 64.0};
  // Converged to ~1e-12 against (8, 8) and (4, 4) at eps = 1/128, t = 2.
  return {4.0, 8.0};
}

PeriodicGrid ReferenceMeshing::grid(int dim, double eps) const
{
  // [-pi, pi) with dx <= 2 pi eps / dx_factor.
  const double wanted = dx_factor / eps;
  int n = 8;
  while (n < wanted * (1.0 - 1e-12)) n *= 2;
  return PeriodicGrid(dim, -std::numbers::pi, std::numbers::pi, n);
}

GridWaveFunction propagate_reference(const GaussianInitialDatum& datum, const Potential& V,
                                     double eps, double t_final, double dt_ref,
                                     const PeriodicGrid& grid, SplittingScheme scheme)
{
  if (grid.total_points() > (std::size_t{1} << 26)) {
    throw std::invalid_argument("propagate_reference: grid exceeds 2^26 points");
  }
  if (!(dt_ref > 0.0) || t_final < 0.0) throw std::invalid_argument("propagate_reference: bad times");
  const double ratio = t_final / dt_ref;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("propagate_reference: t_final is not a multiple of dt_ref");
  }
  GridWaveFunction psi = init_grid_gaussian(grid, datum);
  if (steps == 0) return psi;
  SplitStepSolver solver(grid, V, eps, dt_ref, scheme);
  solver.propagate(psi, steps);
  psi.t = t_final;
  return psi;
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

constexpr char kMagic[8] = {'G', 'W', 'P', 'T', 'R', 'E', 'F', '1'};

template <typename T>
void put(std::ofstream& os, const T& v)
{
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is)
{
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_snapshot(const std::string& path, const GridWaveFunction& psi)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write snapshot '" + path + "'");
  os.write(kMagic, sizeof(kMagic));
  put<std::int32_t>(os, psi.grid.dim);
  put<std::int32_t>(os, psi.grid.points_per_axis);
  for (int j = 0; j < psi.grid.dim; ++j) put<double>(os, psi.grid.lower[j]);
  for (int j = 0; j < psi.grid.dim; ++j) put<double>(os, psi.grid.upper[j]);
  put<double>(os, psi.t);
  os.write(reinterpret_cast<const char*>(psi.values.data()),
           static_cast<std::streamsize>(psi.values.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("short write to snapshot '" + path + "'");
}

GridWaveFunction load_snapshot(const std::string& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot '" + path + "'");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("'" + path + "' is not a reference snapshot");
  }
  GridWaveFunction psi;
  psi.grid.dim = get<std::int32_t>(is);
  psi.grid.points_per_axis = get<std::int32_t>(is);
  if (psi.grid.dim < 1 || psi.grid.dim > 8 || psi.grid.points_per_axis < 1) {
    throw std::runtime_error("corrupt snapshot header in '" + path + "'");
  }
  psi.grid.lower.resize(psi.grid.dim);
  psi.grid.upper.resize(psi.grid.dim);
  for (int j = 0; j < psi.grid.dim; ++j) psi.grid.lower[j] = get<double>(is);
  for (int j = 0; j < psi.grid.dim; ++j) psi.grid.upper[j] = get<double>(is);
  psi.t = get<double>(is);
  psi.values.resize(static_cast<Eigen::Index>(psi.grid.total_points()));
  is.read(reinterpret_cast<char*>(psi.values.data()),
          static_cast<std::streamsize>(psi.values.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("truncated snapshot '" + path + "'");
  return psi;
}

}  // namespace gwpt
