#include "gwpt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fftw3.h>

namespace gwpt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t fnv1a(const std::string& s)
{
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

bool is_step_axis(SweepAxis a) { return a == SweepAxis::dt_c || a == SweepAxis::dt_gt; }

double axis_value(const ExperimentConfig& cfg, SweepAxis a)
{
  return a == SweepAxis::dt_c ? cfg.dt_c : cfg.dt_gt;
}

// Uniform tensor grid: `per_axis` points per axis on [lo, hi] (endpoints included).
PointSet uniform_points(int dim, int per_axis, const Vec& lo, const Vec& hi)
{
  long total = 1;
  for (int j = 0; j < dim; ++j) total *= per_axis;
  PointSet pts(dim, total);
  const auto coord = [&](int j, long i) {
    return per_axis == 1 ? lo[j] : lo[j] + (hi[j] - lo[j]) * static_cast<double>(i) / (per_axis - 1);
  };
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int j = dim - 1; j >= 0; --j) {
      pts(j, flat) = coord(j, rem % per_axis);
      rem /= per_axis;
    }
  }
  return pts;
}

// Trigonometric interpolant of a 1D periodic grid function.
CVec trig_interpolate_1d(const GridWaveFunction& psi, const Vec& x)
{
  const int n = psi.grid.points_per_axis;
  CVec hat = psi.values;
  fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(hat.data()),
                                    reinterpret_cast<fftw_complex*>(hat.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  hat /= static_cast<double>(n);

  const Vec k = psi.grid.wavenumbers(0);
  CVec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = x[i] - psi.grid.lower[0];
    cplx acc = 0.0;
    for (int m = 0; m < n; ++m) acc += hat[m] * std::exp(I * (k[m] * s));
    out[i] = acc;
  }
  return out;
}

double min_alpha_i(const GwptParams& s)
{
  const Mat a = s.alpha.imag();
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Potential potential_for(const ExperimentConfig& cfg)
{
  switch (cfg.example) {
    case Example::cosine1d: return potentials::cosine1d();
    case Example::cosine2d: return potentials::cosine2d();
    case Example::harmonic: return potentials::harmonic(cfg.harmonic_dim);
    case Example::custom: return potentials::polynomial(cfg.custom_coeffs, 1);
  }
  throw ConfigError("unknown example");
}

GaussianInitialDatum datum_for(const ExperimentConfig& cfg)
{
  if (cfg.dim() == 2) return example2_datum(cfg.eps);
  if (cfg.dim() == 1) return example1_datum(cfg.eps);
  // General d: centred at pi/4 in every coordinate, alpha = i I.
  GaussianInitialDatum d;
  d.q0 = Vec::Constant(cfg.dim(), std::numbers::pi / 4);
  d.p0 = Vec::Zero(cfg.dim());
  d.alpha0 = I * CMat::Identity(cfg.dim(), cfg.dim());
  d.eps = cfg.eps;
  return d;
}

PropagatorSettings settings_for(const ExperimentConfig& cfg)
{
  PropagatorSettings s;
  s.eps = cfg.eps;
  s.n = cfg.n_packets;
  s.index_norm = cfg.index_norm;
  s.quad_per_axis = cfg.quad_per_axis;
  s.dt_c = cfg.dt_c;
  s.dt_gt = cfg.dt_gt;
  return s;
}

std::vector<std::string> ResultRow::flags(const Thresholds& th) const
{
  std::vector<std::string> out;
  if (!error.empty()) out.push_back("aborted: " + error);
  const auto check = [&](const char* name, double v, double limit) {
    if (!std::isfinite(v)) {
      out.push_back(std::string(name) + " not finite");
    } else if (v > limit) {
      out.push_back(std::string(name) + " " + format_double(v) + " > " + format_double(limit));
    }
  };
  check("res_symplectic", res_symplectic, th.symplectic);
  check("res_clean_lemma", res_clean_lemma, th.clean_lemma);
  check("res_hermitian", res_hermitian, th.hermitian);
  check("norm_drift", norm_drift, th.norm_drift);
  return out;
}

std::string reference_key(const ExperimentConfig& cfg)
{
  const ReferenceMeshing m = cfg.resolved_meshing();
  std::string canon = to_string(cfg.example) + "|dim=" + std::to_string(cfg.dim());
  for (double c : cfg.custom_coeffs) canon += "|c=" + format_double(c);
  canon += "|eps=" + format_double(cfg.eps) + "|tf=" + format_double(cfg.t_final) +
           "|dx=" + format_double(m.dx_factor) + "|dt=" + format_double(m.dt_factor) +
           "|scheme=" + to_string(cfg.scheme);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

const GridWaveFunction* ReferenceStore::get(const ExperimentConfig& cfg)
{
  if (cfg.reference == ReferenceMode::none) return nullptr;
  const std::string key =
      cfg.reference == ReferenceMode::load ? "load:" + cfg.reference_path : reference_key(cfg);
  if (auto it = memory_.find(key); it != memory_.end()) return &it->second;

  if (cfg.reference == ReferenceMode::load) {
    return &memory_.emplace(key, load_snapshot(cfg.reference_path)).first->second;
  }

  const std::string dir = cfg.cache_dir.empty() ? cache_dir_ : cfg.cache_dir;
  namespace fs = std::filesystem;
  fs::path file;
  if (!dir.empty()) {
    file = fs::path(dir) / ("ref_" + key + ".bin");
    if (fs::exists(file)) return &memory_.emplace(key, load_snapshot(file.string())).first->second;
  }

  const ReferenceMeshing m = cfg.resolved_meshing();
  GridWaveFunction psi = propagate_reference(datum_for(cfg), potential_for(cfg), cfg.eps, cfg.t_final,
                                             m.dt(cfg.eps), m.grid(cfg.dim(), cfg.eps), cfg.scheme);
  if (!file.empty()) {
    fs::create_directories(file.parent_path());
    // Write then rename so concurrent readers never see a partial file.
    const fs::path tmp = file.string() + ".tmp";
    save_snapshot(tmp.string(), psi);
    fs::rename(tmp, file);
  }
  return &memory_.emplace(key, std::move(psi)).first->second;
}

ResultRow run_single(const ExperimentConfig& cfg, const GridWaveFunction* reference)
{
  cfg.validate();
  ResultRow row;
  row.cfg = cfg;
  try {
    SimulationState sim(potential_for(cfg), datum_for(cfg), settings_for(cfg));
    const auto start = Clock::now();
    try {
      sim.advance(cfg.t_final);
    } catch (const InvariantViolation& e) {
      row.error = e.what();
    }
    row.wall_time_core_s = seconds_since(start);
    const Diagnostics& d = sim.diagnostics();
    row.norm_drift = d.norm_drift;
    row.res_symplectic = d.symplectic;
    row.res_clean_lemma = d.clean_lemma;
    row.res_hermitian = d.hermitian;
    row.parameter_seconds = d.parameter_seconds;
    row.galerkin_seconds = d.galerkin_seconds;
    if (reference != nullptr && row.error.empty()) {
      if (std::abs(reference->t - cfg.t_final) > 1e-12 * std::max(1.0, cfg.t_final)) {
        throw std::invalid_argument("reference time " + format_double(reference->t) +
                                    " differs from tf " + format_double(cfg.t_final));
      }
      row.l2_error = l2_error(sim.psi_on(reference->grid), *reference);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

ResultRow run_single(const ExperimentConfig& cfg)
{
  cfg.validate();
  ReferenceStore refs(cfg.cache_dir);
  return run_single(cfg, refs.get(cfg));
}

SweepAxis sweep_axis_from_string(const std::string& s)
{
  if (s == "eps") return SweepAxis::eps;
  if (s == "n" || s == "packets" || s == "n_packets") return SweepAxis::n_packets;
  if (s == "quad" || s == "nq") return SweepAxis::quad;
  if (s == "dt_c" || s == "dt-c") return SweepAxis::dt_c;
  if (s == "dt_gt" || s == "dt-gt") return SweepAxis::dt_gt;
  if (s == "index_norm" || s == "index-norm") return SweepAxis::index_norm;
  throw ConfigError("unknown sweep axis '" + s + "'");
}

std::string to_string(SweepAxis a)
{
  switch (a) {
    case SweepAxis::eps: return "eps";
    case SweepAxis::n_packets: return "n_packets";
    case SweepAxis::quad: return "quad";
    case SweepAxis::dt_c: return "dt_c";
    case SweepAxis::dt_gt: return "dt_gt";
    case SweepAxis::index_norm: return "index_norm";
  }
  return "?";
}

void apply_sweep_value(ExperimentConfig& cfg, SweepAxis axis, const std::string& value)
{
  switch (axis) {
    case SweepAxis::eps: apply_setting(cfg, "eps", value); break;
    case SweepAxis::n_packets: apply_setting(cfg, "packets", value); break;
    case SweepAxis::quad: apply_setting(cfg, "quad", value); break;
    case SweepAxis::dt_c: apply_setting(cfg, "dt_c", value); break;
    case SweepAxis::dt_gt: apply_setting(cfg, "dt_gt", value); break;
    case SweepAxis::index_norm: apply_setting(cfg, "index_norm", value); break;
  }
}

SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis,
                      const std::vector<std::string>& values, ReferenceStore& refs)
{
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  SweepResult out;
  out.axis = axis;
  for (const auto& v : values) {
    ExperimentConfig cfg = base;
    ResultRow row;
    try {
      apply_sweep_value(cfg, axis, v);
      row = run_single(cfg, refs.get(cfg));
    } catch (const std::exception& e) {
      row.cfg = cfg;
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }

  out.observed_order.assign(out.rows.size(), std::numeric_limits<double>::quiet_NaN());
  if (is_step_axis(axis)) {
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
      const double e0 = out.rows[i - 1].l2_error, e1 = out.rows[i].l2_error;
      const double h0 = axis_value(out.rows[i - 1].cfg, axis), h1 = axis_value(out.rows[i].cfg, axis);
      if (e0 > 0.0 && e1 > 0.0 && h0 != h1) out.observed_order[i] = std::log(e0 / e1) / std::log(h0 / h1);
    }
  }
  return out;
}

TimingTable timing_table(const ExperimentConfig& base, const std::vector<int>& n_values,
                         const std::vector<double>& eps_values, int repeats,
                         std::optional<int> quad_offset)
{
  TimingTable table;
  for (int n : n_values) {
    std::vector<ExperimentConfig> cfgs;
    std::vector<TimingCell> cells;
    for (double eps : eps_values) {
      ExperimentConfig cfg = base;
      cfg.n_packets = n;
      cfg.eps = eps;
      if (quad_offset) cfg.quad_per_axis = n + *quad_offset;
      cfg.reference = ReferenceMode::none;
      cfgs.push_back(cfg);
      TimingCell cell;
      cell.n = n;
      cell.eps = eps;
      cell.seconds = std::numeric_limits<double>::infinity();
      cells.push_back(cell);
    }
    // One untimed warm-up, then repeats round-robin over eps so a transient
    // stall cannot land on every repeat of one cell.
    if (!cfgs.empty()) run_single(cfgs.front(), nullptr);
    for (int r = 0; r < std::max(1, repeats); ++r) {
      for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const ResultRow row = run_single(cfgs[i], nullptr);
        if (!row.error.empty()) throw std::runtime_error("timing run failed: " + row.error);
        TimingCell& cell = cells[i];
        if (row.wall_time_core_s < cell.seconds) {
          cell.seconds = row.wall_time_core_s;
          cell.parameter_seconds = row.parameter_seconds;
          cell.galerkin_seconds = row.galerkin_seconds;
        }
      }
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const TimingCell& cell : cells) {
      lo = std::min(lo, cell.seconds);
      hi = std::max(hi, cell.seconds);
      table.cells.push_back(cell);
    }
    table.eps_ratio[n] = hi / lo;
  }
  return table;
}

void emit_profile(std::ostream& os, const ExperimentConfig& cfg, const ProfileOptions& opt,
                  const GridWaveFunction* reference)
{
  cfg.validate();
  if (opt.eta_points < 1 || opt.x_points < 1) throw ConfigError("profile resolutions must be >= 1");
  SimulationState sim(potential_for(cfg), datum_for(cfg), settings_for(cfg));
  sim.advance(cfg.t_final);
  const int d = cfg.dim();

  const PointSet eta = uniform_points(d, opt.eta_points, Vec::Constant(d, -opt.eta_half_width),
                                      Vec::Constant(d, opt.eta_half_width));
  // Periodic x grid: drop the right endpoint.
  const double pi = std::numbers::pi;
  const double upper = pi - 2 * pi / opt.x_points;
  const PointSet x = uniform_points(d, opt.x_points, Vec::Constant(d, -pi), Vec::Constant(d, upper));

  const CVec w = sim.w(eta);
  const CVec psi = sim.psi(x);
  CVec psi_ref;
  const bool with_ref = reference != nullptr && d == 1;
  if (with_ref) psi_ref = trig_interpolate_1d(*reference, x.row(0).transpose());

  os << kCsvVersionLine << '\n' << "# t=" << format_double(sim.time()) << '\n' << "kind";
  for (int j = 0; j < d; ++j) os << ",coord" << j;
  os << ",re,im\n";
  const auto emit = [&](const char* kind, const PointSet& pts, const CVec& v) {
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      os << kind;
      for (int j = 0; j < d; ++j) os << ',' << format_double(pts(j, i));
      os << ',' << format_double(v[i].real()) << ',' << format_double(v[i].imag()) << '\n';
    }
  };
  emit("w", eta, w);
  emit("psi", x, psi);
  if (with_ref) emit("psi_ref", x, psi_ref);
}

std::vector<ErrorSample> error_timeseries(const ExperimentConfig& cfg, long sample_every)
{
  cfg.validate();
  if (sample_every < 1) throw ConfigError("sample interval must be >= 1 coarse step");
  const ReferenceMeshing m = cfg.resolved_meshing();
  const Potential V = potential_for(cfg);
  const GaussianInitialDatum datum = datum_for(cfg);
  const PeriodicGrid grid = m.grid(cfg.dim(), cfg.eps);
  const double dt_ref = m.dt(cfg.eps);
  const double interval = cfg.dt_c * static_cast<double>(sample_every);
  const double ref_per_interval = interval / dt_ref;
  const long ref_steps = std::lround(ref_per_interval);
  if (std::abs(ref_per_interval - static_cast<double>(ref_steps)) > 1e-9 * ref_per_interval) {
    throw ConfigError("sample interval must be a multiple of the reference time step");
  }

  SimulationState sim(V, datum, settings_for(cfg));
  SplitStepSolver solver(grid, V, cfg.eps, dt_ref, cfg.scheme);
  GridWaveFunction ref = init_grid_gaussian(grid, datum);

  std::vector<ErrorSample> out;
  out.push_back({0.0, l2_error(sim.psi_on(grid), ref), min_alpha_i(sim.gwpt())});
  const long coarse_total = std::lround(cfg.t_final / cfg.dt_c);
  for (long done = 0; done < coarse_total;) {
    const long chunk = std::min(sample_every, coarse_total - done);
    done += chunk;
    const double t = static_cast<double>(done) * cfg.dt_c;
    sim.advance(t);
    solver.propagate(ref, chunk == sample_every ? ref_steps : std::lround(chunk * cfg.dt_c / dt_ref));
    ref.t = t;
    out.push_back({t, l2_error(sim.psi_on(grid), ref), min_alpha_i(sim.gwpt())});
  }
  return out;
}

void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows,
                      const std::vector<double>* orders)
{
  os << kCsvVersionLine << '\n'
     << "example,eps,n,index_norm,nq_per_axis,dt_c,dt_gt,t_final,l2_error,norm_drift,"
        "res_symplectic,res_clean_lemma,res_hermitian,wall_time_core_s";
  if (orders) os << ",observed_order";
  os << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& r = rows[i];
    const ExperimentConfig& c = r.cfg;
    os << to_string(c.example) << ',' << format_double(c.eps) << ',' << c.n_packets << ','
       << to_string(c.index_norm) << ',' << c.quad_per_axis << ',' << format_double(c.dt_c) << ','
       << format_double(c.dt_gt) << ',' << format_double(c.t_final) << ','
       << format_double(r.l2_error) << ',' << format_double(r.norm_drift) << ','
       << format_double(r.res_symplectic) << ',' << format_double(r.res_clean_lemma) << ','
       << format_double(r.res_hermitian) << ',' << format_double(r.wall_time_core_s);
    if (orders) os << ',' << format_double(i < orders->size() ? (*orders)[i] : std::nan(""));
    os << '\n';
  }
}

void write_timing_csv(std::ostream& os, const TimingTable& table)
{
  os << kCsvVersionLine << '\n'
     << "n,eps,wall_time_core_s,parameter_s,galerkin_s,eps_ratio_at_n\n";
  for (const auto& c : table.cells) {
    os << c.n << ',' << format_double(c.eps) << ',' << format_double(c.seconds) << ','
       << format_double(c.parameter_seconds) << ',' << format_double(c.galerkin_seconds) << ','
       << format_double(table.eps_ratio.at(c.n)) << '\n';
  }
}

void write_timeseries_csv(std::ostream& os, const std::vector<ErrorSample>& samples)
{
  os << kCsvVersionLine << '\n' << "t,l2_error,alpha_i_min\n";
  for (const auto& s : samples) {
    os << format_double(s.t) << ',' << format_double(s.l2_error) << ','
       << format_double(s.alpha_i_min) << '\n';
  }
}

}  // namespace gwpt
