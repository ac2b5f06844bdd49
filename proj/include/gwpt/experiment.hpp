#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwpt/galerkin.hpp"
#include "gwpt/reference_solver.hpp"

namespace gwpt {

enum class Example { cosine1d, cosine2d, harmonic, custom };
enum class ReferenceMode { compute, load, none };

std::string to_string(Example e);
Example example_from_string(const std::string& s);
std::string to_string(ReferenceMode m);

/// Bad configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  Example example = Example::cosine1d;
  /// harmonic: spatial dimension. custom: always 1.
  int harmonic_dim = 1;
  /// custom: 1D polynomial coefficients a_0..a_m of V(x) = sum a_j x^j.
  std::vector<double> custom_coeffs;

  double eps = 1.0 / 128;
  int n_packets = 10;
  IndexNorm index_norm = IndexNorm::l1;
  int quad_per_axis = 30;
  double dt_c = 1.0 / 128;
  double dt_gt = 1.0 / 2048;
  double t_final = 0.125;

  ReferenceMode reference = ReferenceMode::compute;
  std::string reference_path;
  /// Zero factors mean the dimension's defaults.
  ReferenceMeshing meshing{0.0, 0.0};
  SplittingScheme scheme = SplittingScheme::chin4a;
  std::string cache_dir;
  std::string output_path;

  int dim() const;
  ReferenceMeshing resolved_meshing() const;
  /// Throws ConfigError when an invariant fails.
  void validate() const;
};

/// Parses a number, also accepting fractions like "1/128".
double parse_number(const std::string& s);

/// Sets one key; the same names are used in config files and on the command line.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text, '#' starts a comment.
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Canonical key=value dump (round-trips through parse_config_text).
std::string to_config_text(const ExperimentConfig& cfg);

Potential potential_for(const ExperimentConfig& cfg);
GaussianInitialDatum datum_for(const ExperimentConfig& cfg);
PropagatorSettings settings_for(const ExperimentConfig& cfg);

/// Row flagging thresholds.
struct Thresholds {
  double symplectic = 1e-9;
  double clean_lemma = 1e-8;
  double hermitian = 1e-10;
  double norm_drift = 1e-9;
};

struct ResultRow {
  ExperimentConfig cfg;
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  double norm_drift = std::numeric_limits<double>::quiet_NaN();
  double res_symplectic = std::numeric_limits<double>::quiet_NaN();
  double res_clean_lemma = std::numeric_limits<double>::quiet_NaN();
  double res_hermitian = std::numeric_limits<double>::quiet_NaN();
  double wall_time_core_s = 0.0;
  double parameter_seconds = 0.0;
  double galerkin_seconds = 0.0;
  /// Non-empty when the run aborted.
  std::string error;

  /// Reasons the row fails; empty means it passed.
  std::vector<std::string> flags(const Thresholds& th = {}) const;
  bool failed(const Thresholds& th = {}) const { return !flags(th).empty(); }
};

/// Hex FNV-1a digest of (example, eps, t_final, meshing, scheme).
std::string reference_key(const ExperimentConfig& cfg);

/// Reference wave functions: in-memory, then <cache_dir>/ref_<key>.bin, then computed.
class ReferenceStore {
 public:
  explicit ReferenceStore(std::string cache_dir = {}) : cache_dir_(std::move(cache_dir)) {}

  /// Returns nullptr when cfg.reference is none.
  const GridWaveFunction* get(const ExperimentConfig& cfg);

 private:
  std::string cache_dir_;
  std::map<std::string, GridWaveFunction> memory_;
};

ResultRow run_single(const ExperimentConfig& cfg, const GridWaveFunction* reference);
ResultRow run_single(const ExperimentConfig& cfg);

enum class SweepAxis { eps, n_packets, quad, dt_c, dt_gt, index_norm };
SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis a);

struct SweepResult {
  SweepAxis axis;
  std::vector<ResultRow> rows;
  /// log(e_{i-1}/e_i) / log(h_{i-1}/h_i) for the step-size axes, NaN elsewhere.
  std::vector<double> observed_order;
};

void apply_sweep_value(ExperimentConfig& cfg, SweepAxis axis, const std::string& value);

/// Failed rows record the error and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis,
                      const std::vector<std::string>& values, ReferenceStore& refs);

struct TimingCell {
  int n = 0;
  double eps = 0.0;
  double seconds = 0.0;
  double galerkin_seconds = 0.0;
  double parameter_seconds = 0.0;
};

struct TimingTable {
  std::vector<TimingCell> cells;
  /// Per n: max/min of the loop time across eps.
  std::map<int, double> eps_ratio;
};

/// Times the Algorithm-1 loop only (no reference). Each cell keeps the
/// fastest of `repeats` runs. With a quad_offset the rule size follows n + offset.
TimingTable timing_table(const ExperimentConfig& base, const std::vector<int>& n_values,
                         const std::vector<double>& eps_values, int repeats = 1,
                         std::optional<int> quad_offset = std::nullopt);

struct ProfileOptions {
  int eta_points = 401;
  double eta_half_width = 6.0;
  int x_points = 2001;
};

/// Plot-ready CSV of Re/Im w~ on a uniform eta grid and psi (plus the
/// reference, 1D only) on a uniform x grid.
void emit_profile(std::ostream& os, const ExperimentConfig& cfg, const ProfileOptions& opt,
                  const GridWaveFunction* reference);

/// L2 error against the reference at every `sample_every` coarse steps, with
/// the smallest eigenvalue of alpha_I. Reported, not gated.
struct ErrorSample {
  double t = 0.0;
  double l2_error = 0.0;
  double alpha_i_min = 0.0;
};
std::vector<ErrorSample> error_timeseries(const ExperimentConfig& cfg, long sample_every);

inline constexpr const char* kCsvVersionLine = "# gwpt-hwp v1";

/// Fixed columns, plus observed_order when `orders` is given.
void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows,
                      const std::vector<double>* orders = nullptr);
void write_timing_csv(std::ostream& os, const TimingTable& table);
void write_timeseries_csv(std::ostream& os, const std::vector<ErrorSample>& samples);

std::string format_double(double v);

}  // namespace gwpt
