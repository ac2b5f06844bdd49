// gwpt: experiment driver for the GWPT+HWP propagator.
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gwpt/experiment.hpp"

using namespace gwpt;

namespace {

struct CommonOptions {
  std::string config_file;
  std::vector<std::pair<std::string, std::string*>> overrides;
  std::vector<std::string> extra;  // --set key=value
  std::string eps, packets, index_norm, quad, dt_c, dt_gt, tf, example, reference, out, cache,
      scheme;

  void attach(CLI::App* app)
  {
    app->add_option("-c,--config", config_file, "key=value configuration file");
    const auto add = [&](const char* flag, const char* key, std::string& target, const char* help) {
      app->add_option(flag, target, help);
      overrides.emplace_back(key, &target);
    };
    add("--example", "example", example, "cosine1d | cosine2d | harmonic | custom");
    add("--eps", "eps", eps, "semi-classical parameter (fractions like 1/128 accepted)");
    add("--packets", "packets", packets, "truncation level n");
    add("--index-norm", "index_norm", index_norm, "linf | l1");
    add("--quad", "quad", quad, "Gauss-Hermite points per axis");
    add("--dt-c", "dt_c", dt_c, "coefficient time step");
    add("--dt-gt", "dt_gt", dt_gt, "parameter time step");
    add("--tf", "tf", tf, "final time");
    add("--reference", "reference", reference, "compute | none | load:<path>");
    add("--scheme", "scheme", scheme, "chin4a | yoshida4");
    add("--cache", "cache_dir", cache, "reference cache directory");
    add("--out", "out", out, "output CSV path (default stdout)");
    app->add_option("--set", extra, "extra key=value settings");
  }

  ExperimentConfig build() const
  {
    ExperimentConfig cfg;
    if (!config_file.empty()) cfg = load_config_file(config_file);
    for (const auto& [key, value] : overrides) {
      if (!value->empty()) apply_setting(cfg, key, *value);
    }
    for (const auto& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

// Writes to cfg.output_path or stdout.
class Output {
 public:
  explicit Output(const std::string& path)
  {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> split_csv(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int report_rows(const std::vector<ResultRow>& rows)
{
  int code = 0;
  for (const auto& r : rows) {
    const auto flags = r.flags();
    std::cerr << "n=" << r.cfg.n_packets << " eps=" << format_double(r.cfg.eps)
              << " l2_error=" << format_double(r.l2_error)
              << " core_s=" << format_double(r.wall_time_core_s);
    if (flags.empty()) {
      std::cerr << " ok\n";
    } else {
      code = 1;
      std::cerr << " FLAGGED";
      for (const auto& f : flags) std::cerr << " [" << f << "]";
      std::cerr << '\n';
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"GWPT+HWP spectral propagator and reference experiments"};
  app.require_subcommand(1);

  CommonOptions run_opt, sweep_opt, timing_opt, profile_opt, ref_opt, traj_opt, series_opt,
      coeff_opt, config_opt;

  auto* run = app.add_subcommand("run", "single run, one CSV row");
  run_opt.attach(run);

  auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
  sweep_opt.attach(sweep);
  std::string axis_name, values_list;
  sweep->add_option("--axis", axis_name, "eps | n | quad | dt_c | dt_gt | index_norm")->required();
  sweep->add_option("--values", values_list, "comma-separated values")->required();

  auto* timing = app.add_subcommand("timing", "wall time of the propagation loop over (n, eps)");
  timing_opt.attach(timing);
  std::string n_list = "8,16,32,64", eps_list = "1/64,1/256,1/1024";
  int repeats = 3;
  int quad_offset = 5;
  timing->add_option("--n-values", n_list, "comma-separated n");
  timing->add_option("--eps-values", eps_list, "comma-separated eps");
  timing->add_option("--repeats", repeats, "runs per cell, fastest kept");
  timing->add_option("--quad-offset", quad_offset, "rule size n + offset; negative keeps --quad");

  auto* profile = app.add_subcommand("profile", "w and psi profiles at tf");
  profile_opt.attach(profile);
  ProfileOptions popt;
  profile->add_option("--eta-points", popt.eta_points, "eta samples per axis");
  profile->add_option("--eta-half-width", popt.eta_half_width, "eta range [-h, h]");
  profile->add_option("--x-points", popt.x_points, "x samples per axis on [-pi, pi)");

  auto* reference = app.add_subcommand("reference", "compute (or fetch) the reference and save it");
  ref_opt.attach(reference);
  std::string save_path;
  reference->add_option("--save", save_path, "snapshot path")->required();

  auto* traj = app.add_subcommand("trajectory", "GWPT parameters on every fine step");
  traj_opt.attach(traj);

  auto* series = app.add_subcommand("timeseries", "L2 error and min eig(alpha_I) over time");
  series_opt.attach(series);
  long every = 16;
  series->add_option("--every", every, "coarse steps between samples");

  auto* coeffs = app.add_subcommand("coeffs", "Galerkin coefficients at tf");
  coeff_opt.attach(coeffs);

  auto* show = app.add_subcommand("config", "print the resolved configuration");
  config_opt.attach(show);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = run_opt.build();
      const ResultRow row = run_single(cfg);
      Output out(cfg.output_path);
      write_result_csv(out.stream(), {row});
      return report_rows({row});
    }
    if (*sweep) {
      const ExperimentConfig cfg = sweep_opt.build();
      ReferenceStore refs(cfg.cache_dir);
      const SweepResult res = run_sweep(cfg, sweep_axis_from_string(axis_name), split_csv(values_list), refs);
      Output out(cfg.output_path);
      write_result_csv(out.stream(), res.rows, &res.observed_order);
      return report_rows(res.rows);
    }
    if (*timing) {
      const ExperimentConfig cfg = timing_opt.build();
      std::vector<int> ns;
      for (const auto& s : split_csv(n_list)) ns.push_back(static_cast<int>(parse_number(s)));
      std::vector<double> epss;
      for (const auto& s : split_csv(eps_list)) epss.push_back(parse_number(s));
      const TimingTable table = timing_table(cfg, ns, epss, repeats,
                                              quad_offset >= 0 ? std::optional<int>(quad_offset) : std::nullopt);
      Output out(cfg.output_path);
      write_timing_csv(out.stream(), table);
      for (const auto& [n, ratio] : table.eps_ratio) {
        std::cerr << "n=" << n << " max/min over eps = " << format_double(ratio) << '\n';
      }
      return 0;
    }
    if (*profile) {
      const ExperimentConfig cfg = profile_opt.build();
      ReferenceStore refs(cfg.cache_dir);
      const GridWaveFunction* ref = refs.get(cfg);
      Output out(cfg.output_path);
      emit_profile(out.stream(), cfg, popt, ref);
      return 0;
    }
    if (*reference) {
      ExperimentConfig cfg = ref_opt.build();
      if (cfg.reference == ReferenceMode::none) cfg.reference = ReferenceMode::compute;
      ReferenceStore refs(cfg.cache_dir);
      const GridWaveFunction* ref = refs.get(cfg);
      save_snapshot(save_path, *ref);
      std::cerr << "saved " << ref->grid.points_per_axis << "^" << ref->grid.dim << " grid, t="
                << format_double(ref->t) << ", norm=" << format_double(ref->norm()) << '\n';
      for (const auto& w : ref->warnings) std::cerr << "warning: " << w << '\n';
      return 0;
    }
    if (*traj) {
      const ExperimentConfig cfg = traj_opt.build();
      PropagatorSettings s = settings_for(cfg);
      s.record_trajectory = true;
      SimulationState sim(potential_for(cfg), datum_for(cfg), s);
      sim.advance(cfg.t_final);
      Output out(cfg.output_path);
      write_trajectory_csv(out.stream(), sim.trajectory());
      return 0;
    }
    if (*series) {
      const ExperimentConfig cfg = series_opt.build();
      const auto samples = error_timeseries(cfg, every);
      Output out(cfg.output_path);
      write_timeseries_csv(out.stream(), samples);
      return 0;
    }
    if (*coeffs) {
      const ExperimentConfig cfg = coeff_opt.build();
      SimulationState sim(potential_for(cfg), datum_for(cfg), settings_for(cfg));
      sim.advance(cfg.t_final);
      Output out(cfg.output_path);
      write_coefficients_csv(out.stream(), sim.coeffs());
      return 0;
    }
    if (*show) {
      std::cout << to_config_text(config_opt.build());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
