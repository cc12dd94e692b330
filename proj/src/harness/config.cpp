#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "arpsim/errors.hpp"
#include "arpsim/harness.hpp"

#ifndef ARPSIM_VERSION
#define ARPSIM_VERSION "0.0.0"
#endif

namespace arpsim {

using nlohmann::json;

std::string version() { return ARPSIM_VERSION; }

namespace {

template <class Enum, std::size_t N>
std::string name_of(Enum value, const std::pair<Enum, const char*> (&table)[N]) {
  for (const auto& [v, n] : table)
    if (v == value) return n;
  return "?";
}

template <class Enum, std::size_t N>
Enum parse_name(std::string_view s, const std::pair<Enum, const char*> (&table)[N], const char* what) {
  std::string valid;
  for (const auto& [v, n] : table) {
    if (s == n) return v;
    valid += valid.empty() ? n : std::string(", ") + n;
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) + "' (valid: " + valid + ")");
}

const std::pair<AxisParameter, const char*> kAxisNames[] = {
    {AxisParameter::gdd, "gdd"},
    {AxisParameter::theta_nominal, "theta_nominal"},
    {AxisParameter::detuning, "detuning"},
    {AxisParameter::temperature, "temperature"},
};
const std::pair<PropagatorKind, const char*> kPropagatorNames[] = {
    {PropagatorKind::unitary, "unitary"},
    {PropagatorKind::correlation_expansion, "correlation_expansion"},
    {PropagatorKind::fewmode_exact, "fewmode_exact"},
    {PropagatorKind::dressed_rates, "dressed_rates"},
};
const std::pair<SweepKind, const char*> kKindNames[] = {
    {SweepKind::populations, "populations"},
    {SweepKind::dressed, "dressed"},
};
const std::pair<ExportFormat, const char*> kFormatNames[] = {
    {ExportFormat::csv, "csv"},
    {ExportFormat::json, "json"},
};

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

bool finite(double v) { return std::isfinite(v); }

// JSON readers that reject unknown keys and wrong types with the key path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), path_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    T value{};
    get(key, value);
    out = value;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      require(seen_.count(it.key()) != 0, "unknown key " + path_ + "." + it.key());
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

std::string to_string(AxisParameter p) { return name_of(p, kAxisNames); }
std::string to_string(PropagatorKind p) { return name_of(p, kPropagatorNames); }
std::string to_string(SweepKind k) { return name_of(k, kKindNames); }
std::string to_string(ExportFormat f) { return name_of(f, kFormatNames); }
AxisParameter parse_axis_parameter(std::string_view s) { return parse_name(s, kAxisNames, "axis parameter"); }
PropagatorKind parse_propagator(std::string_view s) { return parse_name(s, kPropagatorNames, "propagator"); }
SweepKind parse_sweep_kind(std::string_view s) { return parse_name(s, kKindNames, "sweep kind"); }
ExportFormat parse_export_format(std::string_view s) { return parse_name(s, kFormatNames, "format"); }

std::vector<double> AxisSpec::values() const {
  std::vector<double> out(steps);
  if (steps == 1) {
    out[0] = min;
    return out;
  }
  for (std::size_t i = 0; i < steps; ++i)
    out[i] = i + 1 == steps ? max : min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return out;
}

std::size_t SweepConfig::grid_size() const {
  std::size_t n = 1;
  for (const AxisSpec& a : axes) n *= a.steps;
  return n;
}

void SweepConfig::validate() const {
  require(!name.empty(), "name must not be empty");
  require(axes.size() <= 2, "at most two axes are supported");
  std::set<AxisParameter> axis_params;
  for (const AxisSpec& a : axes) {
    const std::string label = "axis " + to_string(a.parameter);
    require(a.steps >= 1, label + " needs at least one step");
    require(finite(a.min) && finite(a.max), label + " bounds must be finite");
    require(a.min <= a.max, label + " needs min <= max");
    require(axis_params.insert(a.parameter).second, label + " appears twice");
    if (a.parameter == AxisParameter::theta_nominal) require(a.min >= 0.0, label + " must be non-negative");
    if (a.parameter == AxisParameter::temperature) {
      require(a.min >= 0.0, label + " must be non-negative");
      require(kind == SweepKind::populations, "dressed sweeps do not depend on temperature");
    }
  }

  require(!series.empty(), "at least one series is required");
  std::set<std::string> labels;
  for (const SeriesSpec& s : series) {
    require(!s.label.empty(), "series labels must not be empty");
    require(s.label.find_first_of(",\"\n") == std::string::npos,
            "series label '" + s.label + "' contains a CSV delimiter");
    require(labels.insert(s.label).second, "series label '" + s.label + "' is not unique");
    auto check_override = [&](const std::optional<double>& v, AxisParameter p, const char* what) {
      if (!v) return;
      require(finite(*v), "series '" + s.label + "' " + what + " must be finite");
      require(!axis_params.count(p), "series '" + s.label + "' overrides the scanned " + what);
    };
    check_override(s.theta_pi, AxisParameter::theta_nominal, "theta_pi");
    check_override(s.gdd, AxisParameter::gdd, "gdd");
    check_override(s.detuning, AxisParameter::detuning, "detuning");
    check_override(s.temperature, AxisParameter::temperature, "temperature");
    if (s.theta_pi) require(*s.theta_pi >= 0.0, "series '" + s.label + "' theta_pi must be non-negative");
    if (s.temperature) require(*s.temperature >= 0.0, "series '" + s.label + "' temperature must be non-negative");
    if (s.sigma0) require(finite(*s.sigma0) && *s.sigma0 > 0.0, "series '" + s.label + "' sigma0 must be positive");
    if (kind == SweepKind::populations && s.propagator == PropagatorKind::fewmode_exact) {
      require(bath.mode_count <= kFewModeMaxModes, "fewmode_exact supports at most 4 bath modes");
      require(fewmode_phonons >= 0 && fewmode_phonons <= kFewModeMaxPhonons,
              "fewmode_phonons must be between 0 and 6");
    }
  }

  require(finite(dot.binding_energy), "dot.binding_energy must be finite");
  require(finite(pulse.theta_pi) && pulse.theta_pi >= 0.0, "pulse.theta_pi must be non-negative");
  require(finite(pulse.sigma0) && pulse.sigma0 > 0.0, "pulse.sigma0 must be positive");
  require(finite(pulse.gdd) && finite(pulse.detuning) && finite(pulse.phase), "pulse fields must be finite");
  require(bath.mass_density > 0.0 && bath.sound_velocity > 0.0, "bath density and sound velocity must be positive");
  require(finite(bath.deformation_electron) && finite(bath.deformation_hole), "deformation potentials must be finite");
  require(bath.localization_electron >= 0.0 && bath.localization_hole >= 0.0,
          "localization lengths must be non-negative");
  require(finite(bath.temperature) && bath.temperature >= 0.0, "bath.temperature must be non-negative");
  require(bath.mode_count == 0 || (finite(bath.cutoff) && bath.cutoff > 0.0), "bath.cutoff must be positive");
  require(finite(bath.coupling_scale) && bath.coupling_scale >= 0.0, "bath.coupling_scale must be non-negative");
  require(finite(dt) && dt >= 0.0, "dt must be non-negative");
  require(memory_cap_bytes > 0, "memory_cap_bytes must be positive");
}

json to_json(const SweepConfig& c) {
  json axes = json::array();
  for (const AxisSpec& a : c.axes)
    axes.push_back({{"parameter", to_string(a.parameter)}, {"min", a.min}, {"max", a.max}, {"steps", a.steps}});
  json series = json::array();
  for (const SeriesSpec& s : c.series) {
    json j = {{"label", s.label},
              {"propagator", to_string(s.propagator)},
              {"truncation", static_cast<int>(s.truncation)}};
    auto put = [&](const char* key, const std::optional<double>& v) { j[key] = v ? json(*v) : json(nullptr); };
    put("theta_pi", s.theta_pi);
    put("sigma0", s.sigma0);
    put("gdd", s.gdd);
    put("detuning", s.detuning);
    put("temperature", s.temperature);
    series.push_back(std::move(j));
  }
  const PhononBath& b = c.bath;
  return {
      {"name", c.name},
      {"kind", to_string(c.kind)},
      {"axes", axes},
      {"series", series},
      {"dot", {{"binding_energy", c.dot.binding_energy}}},
      {"pulse",
       {{"theta_pi", c.pulse.theta_pi},
        {"sigma0", c.pulse.sigma0},
        {"gdd", c.pulse.gdd},
        {"detuning", c.pulse.detuning},
        {"phase", c.pulse.phase}}},
      {"bath",
       {{"mass_density", b.mass_density},
        {"sound_velocity", b.sound_velocity},
        {"deformation_electron", b.deformation_electron},
        {"deformation_hole", b.deformation_hole},
        {"localization_electron", b.localization_electron},
        {"localization_hole", b.localization_hole},
        {"temperature", b.temperature},
        {"mode_count", b.mode_count},
        {"cutoff", b.cutoff},
        {"coupling_scale", b.coupling_scale}}},
      {"dt", c.dt},
      {"fewmode_phonons", c.fewmode_phonons},
      {"memory_cap_bytes", c.memory_cap_bytes},
      {"out_dir", c.out_dir.generic_string()},
      {"workers", c.workers},
      {"defaults", c.defaults},
  };
}

SweepConfig config_from_json(const json& j) {
  SweepConfig c;
  Reader root(j, "config");
  root.get("name", c.name);
  std::string kind = to_string(c.kind);
  root.get("kind", kind);
  c.kind = parse_sweep_kind(kind);

  if (const json* axes = root.child("axes")) {
    require(axes->is_array(), "config.axes must be an array");
    for (std::size_t i = 0; i < axes->size(); ++i) {
      Reader r((*axes)[i], "config.axes[" + std::to_string(i) + "]");
      AxisSpec a;
      std::string parameter;
      r.get("parameter", parameter);
      a.parameter = parse_axis_parameter(parameter);
      r.get("min", a.min);
      r.get("max", a.max);
      long long steps = 1;
      r.get("steps", steps);
      require(steps >= 1, "config.axes[" + std::to_string(i) + "].steps must be at least 1");
      a.steps = static_cast<std::size_t>(steps);
      r.finish();
      c.axes.push_back(a);
    }
  }
  if (const json* series = root.child("series")) {
    require(series->is_array(), "config.series must be an array");
    for (std::size_t i = 0; i < series->size(); ++i) {
      Reader r((*series)[i], "config.series[" + std::to_string(i) + "]");
      SeriesSpec s;
      r.get("label", s.label);
      std::string propagator = to_string(s.propagator);
      r.get("propagator", propagator);
      s.propagator = parse_propagator(propagator);
      int truncation = static_cast<int>(s.truncation);
      r.get("truncation", truncation);
      require(truncation == 1 || truncation == 2, "truncation must be 1 or 2");
      s.truncation = static_cast<Truncation>(truncation);
      r.get_optional("theta_pi", s.theta_pi);
      r.get_optional("sigma0", s.sigma0);
      r.get_optional("gdd", s.gdd);
      r.get_optional("detuning", s.detuning);
      r.get_optional("temperature", s.temperature);
      r.finish();
      c.series.push_back(s);
    }
  }
  if (const json* dot = root.child("dot")) {
    Reader r(*dot, "config.dot");
    r.get("binding_energy", c.dot.binding_energy);
    r.finish();
  }
  if (const json* pulse = root.child("pulse")) {
    Reader r(*pulse, "config.pulse");
    r.get("theta_pi", c.pulse.theta_pi);
    r.get("sigma0", c.pulse.sigma0);
    r.get("gdd", c.pulse.gdd);
    r.get("detuning", c.pulse.detuning);
    r.get("phase", c.pulse.phase);
    r.finish();
  }
  if (const json* bath = root.child("bath")) {
    Reader r(*bath, "config.bath");
    r.get("mass_density", c.bath.mass_density);
    r.get("sound_velocity", c.bath.sound_velocity);
    r.get("deformation_electron", c.bath.deformation_electron);
    r.get("deformation_hole", c.bath.deformation_hole);
    r.get("localization_electron", c.bath.localization_electron);
    r.get("localization_hole", c.bath.localization_hole);
    r.get("temperature", c.bath.temperature);
    long long modes = static_cast<long long>(c.bath.mode_count);
    r.get("mode_count", modes);
    require(modes >= 0, "config.bath.mode_count must be non-negative");
    c.bath.mode_count = static_cast<std::size_t>(modes);
    r.get("cutoff", c.bath.cutoff);
    r.get("coupling_scale", c.bath.coupling_scale);
    r.finish();
  }
  root.get("dt", c.dt);
  root.get("fewmode_phonons", c.fewmode_phonons);
  root.get("memory_cap_bytes", c.memory_cap_bytes);
  std::string out_dir = c.out_dir.generic_string();
  root.get("out_dir", out_dir);
  c.out_dir = out_dir;
  long long workers = static_cast<long long>(c.workers);
  root.get("workers", workers);
  require(workers >= 0, "config.workers must be non-negative");
  c.workers = static_cast<std::size_t>(workers);
  root.get("defaults", c.defaults);
  root.finish();
  c.validate();
  return c;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace arpsim
