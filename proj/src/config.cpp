#include "bews/config.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bews {

namespace {

using nlohmann::json;

void require_keys(const json& node, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!node.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& item : node.items())
    if (!allowed.count(item.key()))
      throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
}

double number(const json& node, const std::string& where) {
  if (!node.is_number()) throw ConfigError("config: " + where + " must be a number");
  return node.get<double>();
}

template <typename T>
void read(const json& node, const char* key, T& target, const std::string& where) {
  if (!node.contains(key)) return;
  const json& v = node.at(key);
  if constexpr (std::is_same_v<T, double>) {
    target = number(v, where + "." + key);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError("config: " + where + "." + key + " must be a boolean");
    target = v.get<bool>();
  } else if constexpr (std::is_same_v<T, int>) {
    if (!v.is_number_integer())
      throw ConfigError("config: " + where + "." + key + " must be an integer");
    target = v.get<int>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned())
      throw ConfigError("config: " + where + "." + key + " must be a non-negative integer");
    target = v.get<std::uint64_t>();
  } else {
    static_assert(std::is_same_v<T, std::string>);
    if (!v.is_string()) throw ConfigError("config: " + where + "." + key + " must be a string");
    target = v.get<std::string>();
  }
}

void parse_rotor(const json& node, RotorParams& rotor) {
  require_keys(node, "rotor", {"radius_m", "air_density_kg_m3", "rotor_speed_rad_s"});
  read(node, "radius_m", rotor.radius_m, "rotor");
  read(node, "air_density_kg_m3", rotor.air_density_kg_m3, "rotor");
  read(node, "rotor_speed_rad_s", rotor.rotor_speed_rad_s, "rotor");
}

void parse_wind(const json& node, WindFieldConfig& wind) {
  require_keys(node, "wind",
               {"mean_m_s", "shear", "tower_shadow", "harmonics", "noise_std_m_s"});
  read(node, "mean_m_s", wind.mean_m_s, "wind");
  read(node, "shear", wind.shear, "wind");
  read(node, "tower_shadow", wind.tower_shadow, "wind");
  read(node, "noise_std_m_s", wind.noise_std_m_s, "wind");
  if (node.contains("harmonics")) {
    const json& list = node.at("harmonics");
    if (!list.is_array()) throw ConfigError("config: wind.harmonics must be an array");
    for (const json& h : list) {
      require_keys(h, "wind.harmonics[]", {"multiple", "amplitude_m_s", "phase_rad"});
      WindHarmonic harmonic;
      read(h, "multiple", harmonic.multiple, "wind.harmonics[]");
      read(h, "amplitude_m_s", harmonic.amplitude, "wind.harmonics[]");
      read(h, "phase_rad", harmonic.phase, "wind.harmonics[]");
      wind.harmonics.push_back(harmonic);
    }
  }
}

void parse_gains(const json& node, const RotorParams& rotor, EstimatorGains& gains) {
  require_keys(node, "gains", {"K_col", "K_0", "omega0", "k_p", "k_i"});
  double K_col = 0.6, K_0 = 1.2, omega0 = rotor.rotor_speed_rad_s;
  read(node, "K_col", K_col, "gains");
  read(node, "K_0", K_0, "gains");
  read(node, "omega0", omega0, "gains");
  gains = EstimatorGains::from_coleman(K_col, K_0, omega0);
  // Explicit per-blade gains override the theorem-consistent mapping for
  // sensitivity studies.
  if (node.contains("k_p") || node.contains("k_i")) {
    double k_p = gains.k_p, k_i = gains.k_i;
    read(node, "k_p", k_p, "gains");
    read(node, "k_i", k_i, "gains");
    gains = EstimatorGains(k_p, k_i, K_col, K_0, omega0);
  }
}

void parse_sim(const json& node, Scenario& s) {
  require_keys(node, "sim",
               {"dt_s", "duration_s", "seed", "initial_estimate_m_s", "initial_azimuth_rad",
                "feedback_sign", "moment_scale_nm"});
  read(node, "dt_s", s.dt_s, "sim");
  read(node, "duration_s", s.duration_s, "sim");
  read(node, "seed", s.seed, "sim");
  read(node, "initial_estimate_m_s", s.initial_estimate_m_s, "sim");
  read(node, "initial_azimuth_rad", s.initial_azimuth_rad, "sim");
  read(node, "feedback_sign", s.feedback_sign, "sim");
  read(node, "moment_scale_nm", s.moment_scale_nm, "sim");
}

void parse_analysis(const json& node, AnalysisConfig& a) {
  require_keys(node, "analysis",
               {"theorem1_grid", "identification", "bode", "compare_shear_amplitudes",
                "metrics_window_revs"});
  read(node, "theorem1_grid", a.theorem1_grid, "analysis");
  read(node, "metrics_window_revs", a.metrics_window_revs, "analysis");
  if (node.contains("identification")) {
    const json& id = node.at("identification");
    require_keys(id, "analysis.identification",
                 {"frequencies", "amplitude", "cycles", "discard_cycles"});
    read(id, "frequencies", a.identification_frequencies, "analysis.identification");
    read(id, "amplitude", a.identification_amplitude, "analysis.identification");
    read(id, "cycles", a.identification_cycles, "analysis.identification");
    read(id, "discard_cycles", a.identification_discard_cycles, "analysis.identification");
  }
  if (node.contains("bode")) {
    const json& bode = node.at("bode");
    require_keys(bode, "analysis.bode", {"points", "diagonal_only"});
    read(bode, "points", a.bode_points, "analysis.bode");
    read(bode, "diagonal_only", a.bode_diagonal_only, "analysis.bode");
  }
  if (node.contains("compare_shear_amplitudes")) {
    const json& list = node.at("compare_shear_amplitudes");
    if (!list.is_array() || list.empty())
      throw ConfigError("config: analysis.compare_shear_amplitudes must be a non-empty array");
    a.compare_shear_amplitudes.clear();
    for (const json& v : list)
      a.compare_shear_amplitudes.push_back(number(v, "analysis.compare_shear_amplitudes[]"));
  }
}

Config parse(const json& root) {
  require_keys(root, "top level",
               {"rotor", "surface", "wind", "estimator", "gains", "sim", "clamp", "analysis"});

  Config config;
  Scenario& s = config.scenario;

  if (root.contains("rotor")) parse_rotor(root.at("rotor"), s.rotor);
  if (root.contains("surface")) {
    const json& surf = root.at("surface");
    require_keys(surf, "surface", {"file", "azimuth_amplitude"});
    if (surf.contains("file")) {
      std::string file;
      read(surf, "file", file, "surface");
      s.surface_file = file;
    }
    read(surf, "azimuth_amplitude", s.surface_azimuth_amplitude, "surface");
  }
  if (root.contains("wind")) parse_wind(root.at("wind"), s.wind);
  if (root.contains("estimator")) {
    std::string kind;
    read(root, "estimator", kind, "top level");
    if (kind == "pin")
      s.estimator = EstimatorKind::Pin;
    else if (kind == "coleman")
      s.estimator = EstimatorKind::Coleman;
    else if (kind == "both")
      s.estimator = EstimatorKind::Both;
    else
      throw ConfigError("config: estimator must be one of pin|coleman|both");
  }
  // Gains default to the theorem-consistent mapping at the configured rotor
  // speed, so rebuild them whenever the rotor block changed omega.
  s.gains = EstimatorGains::from_coleman(0.6, 1.2, s.rotor.rotor_speed_rad_s);
  if (root.contains("gains")) parse_gains(root.at("gains"), s.rotor, s.gains);
  if (root.contains("sim")) parse_sim(root.at("sim"), s);
  if (root.contains("clamp")) {
    const json& clamp = root.at("clamp");
    require_keys(clamp, "clamp", {"min_m_s", "max_m_s"});
    read(clamp, "min_m_s", s.clamp.lo, "clamp");
    read(clamp, "max_m_s", s.clamp.hi, "clamp");
  }
  if (root.contains("analysis")) parse_analysis(root.at("analysis"), config.analysis);

  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config;
}

}  // namespace

Config parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  try {
    return parse(root);
  } catch (const std::invalid_argument& e) {
    // Domain-type constructors (gains, wind, rotor) validate their own
    // invariants; surface them as schema errors here.
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const NonPositiveWind& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void perturb_gain(Scenario& scenario, const std::string& name, double percent) {
  const double factor = 1.0 + percent / 100.0;
  EstimatorGains g = scenario.gains;
  if (name == "k_p")
    g.k_p *= factor;
  else if (name == "k_i")
    g.k_i *= factor;
  else if (name == "K_col")
    g.K_col *= factor;
  else if (name == "K_0")
    g.K_0 *= factor;
  else
    throw ConfigError("perturb-gain: unknown gain '" + name + "'");
  scenario.gains = EstimatorGains(g.k_p, g.k_i, g.K_col, g.K_0, g.omega0);
}

}  // namespace bews
