#include <cmath>
#include <fstream>
#include <sstream>

#include "gwpt/experiment.hpp"

namespace gwpt {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& s)
{
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s)
{
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_number(trim(item)));
  }
  return out;
}

}  // namespace

std::string to_string(Example e)
{
  switch (e) {
    case Example::cosine1d: return "cosine1d";
    case Example::cosine2d: return "cosine2d";
    case Example::harmonic: return "harmonic";
    case Example::custom: return "custom";
  }
  return "?";
}

Example example_from_string(const std::string& s)
{
  if (s == "cosine1d" || s == "example1") return Example::cosine1d;
  if (s == "cosine2d" || s == "example2") return Example::cosine2d;
  if (s == "harmonic") return Example::harmonic;
  if (s == "custom") return Example::custom;
  throw ConfigError("unknown example '" + s + "'");
}

std::string to_string(ReferenceMode m)
{
  switch (m) {
    case ReferenceMode::compute: return "compute";
    case ReferenceMode::load: return "load";
    case ReferenceMode::none: return "none";
  }
  return "?";
}

double parse_number(const std::string& raw)
{
  const std::string s = trim(raw);
  const auto slash = s.find('/');
  try {
    std::size_t pos = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(s, &pos);
      if (pos == s.size()) return v;
    } else {
      const std::string num = trim(s.substr(0, slash));
      const std::string den = trim(s.substr(slash + 1));
      std::size_t pn = 0, pd = 0;
      const double a = std::stod(num, &pn);
      const double b = std::stod(den, &pd);
      if (pn == num.size() && pd == den.size() && b != 0.0) return a / b;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("not a number: '" + raw + "'");
}

int ExperimentConfig::dim() const
{
  switch (example) {
    case Example::cosine1d: return 1;
    case Example::cosine2d: return 2;
    case Example::harmonic: return harmonic_dim;
    case Example::custom: return 1;
  }
  return 1;
}

ReferenceMeshing ExperimentConfig::resolved_meshing() const
{
  ReferenceMeshing m = ReferenceMeshing::defaults_for(dim());
  if (meshing.dx_factor > 0.0) m.dx_factor = meshing.dx_factor;
  if (meshing.dt_factor > 0.0) m.dt_factor = meshing.dt_factor;
  return m;
}

void ExperimentConfig::validate() const
{
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in (0, 1]");
  if (n_packets < 0) throw ConfigError("packets must be >= 0");
  if (quad_per_axis < 1) throw ConfigError("quad must be >= 1");
  if (harmonic_dim < 1) throw ConfigError("dim must be >= 1");
  if (example == Example::custom && custom_coeffs.empty()) {
    throw ConfigError("custom example needs custom_coeffs");
  }
  if (!(t_final >= 0.0)) throw ConfigError("tf must be >= 0");
  try {
    fine_steps_per_half(dt_c, dt_gt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double steps = t_final / dt_c;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("tf must be an integer multiple of dt_c");
  }
  if (reference == ReferenceMode::load && reference_path.empty()) {
    throw ConfigError("reference=load needs a path (reference=load:<path>)");
  }
  if (reference == ReferenceMode::compute) {
    const double ref_steps = t_final / resolved_meshing().dt(eps);
    if (std::abs(ref_steps - std::round(ref_steps)) > 1e-9 * std::max(1.0, ref_steps)) {
      throw ConfigError("tf must be an integer multiple of the reference time step");
    }
  }
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_raw, const std::string& value_raw)
{
  const std::string key = trim(key_raw);
  const std::string value = trim(value_raw);
  if (key == "example") {
    cfg.example = example_from_string(value);
  } else if (key == "dim") {
    cfg.harmonic_dim = parse_int(key, value);
  } else if (key == "custom_coeffs") {
    cfg.custom_coeffs = parse_list(value);
  } else if (key == "eps") {
    cfg.eps = parse_number(value);
  } else if (key == "packets" || key == "n_packets" || key == "n") {
    cfg.n_packets = parse_int(key, value);
  } else if (key == "index_norm" || key == "index-norm") {
    try {
      cfg.index_norm = index_norm_from_string(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "quad" || key == "quad_per_axis") {
    cfg.quad_per_axis = parse_int(key, value);
  } else if (key == "dt_c" || key == "dt-c") {
    cfg.dt_c = parse_number(value);
  } else if (key == "dt_gt" || key == "dt-gt") {
    cfg.dt_gt = parse_number(value);
  } else if (key == "tf" || key == "t_final") {
    cfg.t_final = parse_number(value);
  } else if (key == "reference") {
    if (value == "compute") {
      cfg.reference = ReferenceMode::compute;
    } else if (value == "none") {
      cfg.reference = ReferenceMode::none;
    } else if (value.rfind("load:", 0) == 0) {
      cfg.reference = ReferenceMode::load;
      cfg.reference_path = value.substr(5);
    } else {
      throw ConfigError("reference must be compute, none or load:<path>");
    }
  } else if (key == "dx_factor") {
    cfg.meshing.dx_factor = parse_number(value);
  } else if (key == "dt_factor") {
    cfg.meshing.dt_factor = parse_number(value);
  } else if (key == "scheme") {
    try {
      cfg.scheme = splitting_scheme_from_string(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "cache_dir" || key == "cache") {
    cfg.cache_dir = value;
  } else if (key == "out" || key == "output_path") {
    cfg.output_path = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base)
{
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::string to_config_text(const ExperimentConfig& cfg)
{
  std::ostringstream os;
  os << "example=" << to_string(cfg.example) << '\n';
  if (cfg.example == Example::harmonic) os << "dim=" << cfg.harmonic_dim << '\n';
  if (!cfg.custom_coeffs.empty()) {
    os << "custom_coeffs=";
    for (std::size_t i = 0; i < cfg.custom_coeffs.size(); ++i) {
      os << (i ? "," : "") << format_double(cfg.custom_coeffs[i]);
    }
    os << '\n';
  }
  os << "eps=" << format_double(cfg.eps) << '\n'
     << "packets=" << cfg.n_packets << '\n'
     << "index_norm=" << to_string(cfg.index_norm) << '\n'
     << "quad=" << cfg.quad_per_axis << '\n'
     << "dt_c=" << format_double(cfg.dt_c) << '\n'
     << "dt_gt=" << format_double(cfg.dt_gt) << '\n'
     << "tf=" << format_double(cfg.t_final) << '\n'
     << "reference="
     << (cfg.reference == ReferenceMode::load ? "load:" + cfg.reference_path : to_string(cfg.reference))
     << '\n';
  if (cfg.meshing.dx_factor > 0.0) os << "dx_factor=" << format_double(cfg.meshing.dx_factor) << '\n';
  if (cfg.meshing.dt_factor > 0.0) os << "dt_factor=" << format_double(cfg.meshing.dt_factor) << '\n';
  os << "scheme=" << to_string(cfg.scheme) << '\n';
  if (!cfg.cache_dir.empty()) os << "cache_dir=" << cfg.cache_dir << '\n';
  if (!cfg.output_path.empty()) os << "out=" << cfg.output_path << '\n';
  return os.str();
}

}  // namespace gwpt
