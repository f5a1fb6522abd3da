#include "ghzcav/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "ghzcav/error.hpp"

namespace ghzcav {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Strict object reader: typed getters record which keys were consumed and
// finish() rejects the rest.
class Reader {
 public:
  Reader(const nlohmann::json& node, std::string path, const std::string& source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    throw ConfigError(source_ + ": " + (where.empty() ? "/" : where) + ": " + what);
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const nlohmann::json* find(const std::string& key) {
    used_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::optional<double> optional_number(const std::string& key) {
    const auto* v = find(key);
    if (v == nullptr || v->is_null()) return std::nullopt;
    if (!v->is_number()) fail(path_ + "/" + key, "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(path_ + "/" + key, "expected a finite number");
    return d;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto v = optional_number(key);
    if (v) return *v;
    if (fallback) return *fallback;
    fail(path_ + "/" + key, "required number is missing");
  }

  // Accepts "inf" for infinite margins.
  double margin(const std::string& key, double fallback) {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    if (v->is_string() && v->get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    if (!v->is_number()) fail(path_ + "/" + key, "expected a number or \"inf\"");
    return v->get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) fail(path_ + "/" + key, "expected an integer");
    return v->get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_unsigned()) fail(path_ + "/" + key, "expected a nonnegative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(path_ + "/" + key, "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(path_ + "/" + key, "expected a string");
    return v->get<std::string>();
  }

  Reader child(const std::string& key) {
    const auto* v = find(key);
    static const nlohmann::json empty = nlohmann::json::object();
    return Reader(v == nullptr ? empty : *v, path_ + "/" + key, source_);
  }

  const nlohmann::json& array(const std::string& key) {
    const auto* v = find(key);
    static const nlohmann::json empty = nlohmann::json::array();
    if (v == nullptr) return empty;
    if (!v->is_array()) fail(path_ + "/" + key, "expected an array");
    return *v;
  }

  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) fail(path_ + "/" + it.key(), "unknown key");
    }
  }

 private:
  const nlohmann::json& node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

void require(bool ok, const Reader& r, const std::string& key, const std::string& what) {
  if (!ok) r.fail(r.path() + "/" + key, what);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void write(const Json& j, std::ostringstream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(it.key()).dump() << ": ";
        write(it.value(), out, indent + 2);
      }
      out << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write(j[i], out, indent + 2);
      }
      out << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

Json margin_value(double v) { return std::isinf(v) ? Json("inf") : Json(v); }

// Expands one pointer with "*" segments against `doc`.
void expand(Json& node, const std::vector<std::string>& parts, std::size_t i, double value, int& hits) {
  if (i == parts.size()) {
    if (!node.is_number() && !node.is_null() && !(node.is_string() && node.get<std::string>() == "inf")) return;
    if (node.is_number_integer() && value == std::floor(value)) {
      node = static_cast<long long>(value);
    } else {
      node = value;
    }
    ++hits;
    return;
  }
  const std::string& key = parts[i];
  if (key == "*") {
    if (node.is_array()) {
      for (auto& child : node) expand(child, parts, i + 1, value, hits);
    } else if (node.is_object()) {
      for (auto it = node.begin(); it != node.end(); ++it) expand(it.value(), parts, i + 1, value, hits);
    }
    return;
  }
  if (node.is_object()) {
    auto it = node.find(key);
    if (it != node.end()) expand(it.value(), parts, i + 1, value, hits);
    return;
  }
  if (node.is_array()) {
    char* end = nullptr;
    const unsigned long idx = std::strtoul(key.c_str(), &end, 10);
    if (end != key.c_str() && *end == '\0' && idx < node.size()) expand(node[idx], parts, i + 1, value, hits);
  }
}

std::string unescape(std::string s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '~' && i + 1 < s.size() && (s[i + 1] == '0' || s[i + 1] == '1')) {
      out += s[i + 1] == '0' ? '~' : '/';
      ++i;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const Json& ordered, const std::string& source) {
  const nlohmann::json doc = nlohmann::json::parse(ordered.dump());
  Reader root(doc, "", source);
  ExperimentConfig c;

  Reader device = root.child("device");
  {
    Reader q = device.child("qubit1");
    c.qubit1.g_hz = q.number("g_hz");
    c.qubit1.f10_hz = q.number("f10_hz");
    c.qubit1.f21_hz = q.number("f21_hz");
    c.qubit1.gamma1r_per_s = q.number("gamma1r_per_s", 0.0);
    c.qubit1.gamma1p_per_s = q.number("gamma1p_per_s", 0.0);
    c.qubit1.gamma2r_per_s = q.number("gamma2r_per_s", 0.0);
    c.qubit1.gamma2p_per_s = q.number("gamma2p_per_s", 0.0);
    require(c.qubit1.g_hz > 0.0, q, "g_hz", "must be positive");
    require(c.qubit1.f10_hz > 0.0, q, "f10_hz", "must be positive");
    require(c.qubit1.f21_hz > 0.0, q, "f21_hz", "must be positive");
    for (const char* k : {"gamma1r_per_s", "gamma1p_per_s", "gamma2r_per_s", "gamma2p_per_s"}) {
      require(q.number(k, 0.0) >= 0.0, q, k, "must be nonnegative");
    }
    q.finish();
  }
  {
    Reader cav = device.child("cavity");
    c.cavity.freq_hz = cav.number("freq_hz");
    c.cavity.quality = cav.margin("quality", 0.0);
    c.cavity.n_max = static_cast<int>(cav.integer("n_max", 2));
    require(c.cavity.freq_hz > 0.0, cav, "freq_hz", "must be positive");
    require(c.cavity.quality > 0.0, cav, "quality", "must be positive (or \"inf\")");
    require(c.cavity.n_max >= 1, cav, "n_max", "must be >= 1");
    cav.finish();
  }
  {
    const auto& arr = device.array("spectators");
    if (arr.empty()) device.fail(device.path() + "/spectators", "need at least one spectator qubit");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader s(arr[i], device.path() + "/spectators/" + std::to_string(i), source);
      SpectatorConfig sc;
      sc.g_hz = s.number("g_hz");
      sc.f10_hz = s.number("f10_hz");
      sc.f21_hz = s.number("f21_hz");
      sc.f32_hz = s.optional_number("f32_hz");
      sc.cavity_detuning_ratio = s.optional_number("cavity_detuning_ratio");
      sc.gamma1r_per_s = s.number("gamma1r_per_s", 0.0);
      sc.gamma1p_per_s = s.number("gamma1p_per_s", 0.0);
      require(sc.g_hz > 0.0, s, "g_hz", "must be positive");
      require(sc.f10_hz > 0.0, s, "f10_hz", "must be positive");
      require(sc.f21_hz > 0.0, s, "f21_hz", "must be positive");
      require(sc.f32_hz.has_value() != sc.cavity_detuning_ratio.has_value(), s, "f32_hz",
              "give exactly one of f32_hz and cavity_detuning_ratio");
      if (sc.f32_hz) require(*sc.f32_hz > 0.0, s, "f32_hz", "must be positive");
      if (sc.cavity_detuning_ratio) require(*sc.cavity_detuning_ratio > 0.0, s, "cavity_detuning_ratio", "must be positive");
      require(sc.gamma1r_per_s >= 0.0, s, "gamma1r_per_s", "must be nonnegative");
      require(sc.gamma1p_per_s >= 0.0, s, "gamma1p_per_s", "must be nonnegative");
      s.finish();
      c.spectators.push_back(sc);
    }
    if (c.spectators.size() > 11) device.fail(device.path() + "/spectators", "at most 11 spectators are supported");
  }
  device.finish();
  if (std::abs(c.qubit1.f21_hz - c.cavity.freq_hz) > 1e-9 * c.cavity.freq_hz) {
    root.fail("/device/qubit1/f21_hz", "must equal the cavity frequency (the |1>-|2> transition is resonant)");
  }

  {
    Reader p = root.child("protocol");
    c.protocol.rabi_r_over_g = p.number("rabi_r_over_g", 10.0);
    c.protocol.rabi_r_tilde_over_g = p.number("rabi_r_tilde_over_g", 10.0);
    c.protocol.max_rabi_over_g = p.number("max_rabi_over_g", 20.0);
    c.protocol.samples_per_segment = static_cast<int>(p.integer("samples_per_segment", 8));
    c.protocol.first_qubit_jc_in_step2 = p.boolean("first_qubit_jc_in_step2", true);
    c.protocol.spectator_cavity_in_steps13 = p.boolean("spectator_cavity_in_steps13", true);
    c.protocol.jc_during_pulses = p.boolean("jc_during_pulses", false);
    require(c.protocol.rabi_r_over_g > 0.0, p, "rabi_r_over_g", "must be positive");
    require(c.protocol.rabi_r_tilde_over_g > 0.0, p, "rabi_r_tilde_over_g", "must be positive");
    require(c.protocol.rabi_r_over_g <= c.protocol.max_rabi_over_g, p, "rabi_r_over_g",
            "exceeds max_rabi_over_g = " + format_double(c.protocol.max_rabi_over_g));
    require(c.protocol.rabi_r_tilde_over_g <= c.protocol.max_rabi_over_g, p, "rabi_r_tilde_over_g",
            "exceeds max_rabi_over_g = " + format_double(c.protocol.max_rabi_over_g));
    require(c.protocol.samples_per_segment >= 1, p, "samples_per_segment", "must be >= 1");
    p.finish();
  }
  {
    Reader cal = root.child("calibration");
    Reader m = cal.child("margins");
    auto& mt = c.calibration.margins;
    mt.pulse_detuning_ratio = m.margin("pulse_detuning_ratio", 10.0);
    mt.cavity_detuning_ratio = m.margin("cavity_detuning_ratio", 10.0);
    mt.raman_ratio = m.margin("raman_ratio", 10.0);
    mt.cavity_stark_ratio = m.margin("cavity_stark_ratio", 10.0);
    mt.pulse_stark_ratio = m.margin("pulse_stark_ratio", 10.0);
    for (const char* k : {"pulse_detuning_ratio", "cavity_detuning_ratio", "raman_ratio", "cavity_stark_ratio",
                          "pulse_stark_ratio"}) {
      require(m.margin(k, 10.0) > 0.0, m, k, "must be positive");
    }
    m.finish();
    Reader t = cal.child("thresholds");
    c.calibration.thresholds.warn_ratio = t.number("warn_ratio", 10.0);
    c.calibration.thresholds.fail_ratio = t.number("fail_ratio", 3.0);
    require(c.calibration.thresholds.fail_ratio > 0.0 &&
                c.calibration.thresholds.warn_ratio >= c.calibration.thresholds.fail_ratio,
            t, "warn_ratio", "need warn_ratio >= fail_ratio > 0");
    t.finish();
    c.calibration.grid_points = static_cast<int>(cal.integer("grid_points", 1024));
    c.calibration.refinements = static_cast<int>(cal.integer("refinements", 6));
    c.calibration.delta_over_g = cal.optional_number("delta_over_g");
    c.calibration.lambda_over_g = cal.optional_number("lambda_over_g");
    require(c.calibration.grid_points >= 2, cal, "grid_points", "must be >= 2");
    require(c.calibration.refinements >= 0, cal, "refinements", "must be >= 0");
    require(c.calibration.delta_over_g.has_value() == c.calibration.lambda_over_g.has_value(), cal, "delta_over_g",
            "delta_over_g and lambda_over_g must be given together");
    cal.finish();
  }
  {
    Reader p = root.child("propagator");
    c.propagator.method = p.string("method", "static-krylov");
    c.propagator.krylov_dim = static_cast<int>(p.integer("krylov_dim", 30));
    c.propagator.tolerance = p.number("tolerance", 1e-12);
    c.propagator.step_gt = p.number("step_gt", 0.005);
    c.propagator.timedep_tolerance = p.number("timedep_tolerance", 1e-8);
    c.propagator.max_refinements = static_cast<int>(p.integer("max_refinements", 4));
    try {
      parse_propagator_method(c.propagator.method);
      propagator_config(c).validate();
    } catch (const ConfigError& e) {
      p.fail(p.path(), e.what());
    }
    p.finish();
  }
  c.mode = root.string("mode", "closed-form");
  try {
    parse_mode(c.mode);
  } catch (const ConfigError& e) {
    root.fail("/mode", e.what());
  }
  {
    Reader n = root.child("noise");
    c.noise.n_traj = static_cast<int>(n.integer("n_traj", 500));
    c.noise.max_step_s = n.number("max_step_s", 0.0);
    c.noise.target_stderr = n.optional_number("target_stderr");
    c.noise.attribution = n.boolean("attribution", true);
    require(c.noise.n_traj >= 1, n, "n_traj", "must be >= 1");
    require(c.noise.max_step_s >= 0.0, n, "max_step_s", "must be nonnegative");
    if (c.noise.target_stderr) require(*c.noise.target_stderr > 0.0, n, "target_stderr", "must be positive");
    n.finish();
  }
  {
    Reader s = root.child("sweep");
    c.sweep.axis = s.string("axis", "");
    const auto& values = s.array("values");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i].is_number()) s.fail(s.path() + "/values/" + std::to_string(i), "expected a number");
      c.sweep.values.push_back(values[i].get<double>());
    }
    s.finish();
  }
  c.seed = root.unsigned_integer("seed", 0);
  root.finish();
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("parse error");
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                      (pos == std::string::npos ? what : what.substr(pos)));
  }
  return config_from_json(doc, source);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Json to_json(const ExperimentConfig& c) {
  Json doc;
  Json& device = doc["device"];
  device["qubit1"] = {{"g_hz", c.qubit1.g_hz},
                      {"f10_hz", c.qubit1.f10_hz},
                      {"f21_hz", c.qubit1.f21_hz},
                      {"gamma1r_per_s", c.qubit1.gamma1r_per_s},
                      {"gamma1p_per_s", c.qubit1.gamma1p_per_s},
                      {"gamma2r_per_s", c.qubit1.gamma2r_per_s},
                      {"gamma2p_per_s", c.qubit1.gamma2p_per_s}};
  Json specs = Json::array();
  for (const auto& s : c.spectators) {
    Json j;
    j["g_hz"] = s.g_hz;
    j["f10_hz"] = s.f10_hz;
    j["f21_hz"] = s.f21_hz;
    if (s.f32_hz) j["f32_hz"] = *s.f32_hz;
    if (s.cavity_detuning_ratio) j["cavity_detuning_ratio"] = *s.cavity_detuning_ratio;
    j["gamma1r_per_s"] = s.gamma1r_per_s;
    j["gamma1p_per_s"] = s.gamma1p_per_s;
    specs.push_back(j);
  }
  device["spectators"] = specs;
  device["cavity"] = {{"freq_hz", c.cavity.freq_hz}, {"quality", margin_value(c.cavity.quality)}, {"n_max", c.cavity.n_max}};
  doc["protocol"] = {{"rabi_r_over_g", c.protocol.rabi_r_over_g},
                     {"rabi_r_tilde_over_g", c.protocol.rabi_r_tilde_over_g},
                     {"max_rabi_over_g", c.protocol.max_rabi_over_g},
                     {"samples_per_segment", c.protocol.samples_per_segment},
                     {"first_qubit_jc_in_step2", c.protocol.first_qubit_jc_in_step2},
                     {"spectator_cavity_in_steps13", c.protocol.spectator_cavity_in_steps13},
                     {"jc_during_pulses", c.protocol.jc_during_pulses}};
  const auto& m = c.calibration.margins;
  Json cal;
  cal["margins"] = {{"pulse_detuning_ratio", margin_value(m.pulse_detuning_ratio)},
                    {"cavity_detuning_ratio", margin_value(m.cavity_detuning_ratio)},
                    {"raman_ratio", margin_value(m.raman_ratio)},
                    {"cavity_stark_ratio", margin_value(m.cavity_stark_ratio)},
                    {"pulse_stark_ratio", margin_value(m.pulse_stark_ratio)}};
  cal["thresholds"] = {{"warn_ratio", c.calibration.thresholds.warn_ratio},
                       {"fail_ratio", c.calibration.thresholds.fail_ratio}};
  cal["grid_points"] = c.calibration.grid_points;
  cal["refinements"] = c.calibration.refinements;
  if (c.calibration.delta_over_g) cal["delta_over_g"] = *c.calibration.delta_over_g;
  if (c.calibration.lambda_over_g) cal["lambda_over_g"] = *c.calibration.lambda_over_g;
  doc["calibration"] = cal;
  doc["propagator"] = {{"method", c.propagator.method},
                       {"krylov_dim", c.propagator.krylov_dim},
                       {"tolerance", c.propagator.tolerance},
                       {"step_gt", c.propagator.step_gt},
                       {"timedep_tolerance", c.propagator.timedep_tolerance},
                       {"max_refinements", c.propagator.max_refinements}};
  doc["mode"] = c.mode;
  Json noise = {{"n_traj", c.noise.n_traj}, {"max_step_s", c.noise.max_step_s}};
  if (c.noise.target_stderr) noise["target_stderr"] = *c.noise.target_stderr;
  noise["attribution"] = c.noise.attribution;
  doc["noise"] = noise;
  doc["sweep"] = {{"axis", c.sweep.axis}, {"values", c.sweep.values}};
  doc["seed"] = c.seed;
  return doc;
}

std::string dump_json(const Json& doc) {
  std::ostringstream out;
  write(doc, out, 0);
  out << "\n";
  return out.str();
}

void apply_axis(Json& doc, const std::string& axis, double value) {
  if (axis.empty()) throw ConfigError("sweep axis is empty");
  std::stringstream list(axis);
  std::string pointer;
  while (std::getline(list, pointer, ',')) {
    if (pointer.empty() || pointer.front() != '/') throw ConfigError("sweep axis '" + pointer + "' is not a JSON pointer");
    std::vector<std::string> parts;
    std::stringstream ss(pointer.substr(1));
    std::string part;
    while (std::getline(ss, part, '/')) parts.push_back(unescape(part));
    int hits = 0;
    expand(doc, parts, 0, value, hits);
    if (hits == 0) throw ConfigError("unknown sweep axis path '" + pointer + "'");
  }
}

Units units_of(const ExperimentConfig& c) { return Units{kTwoPi * c.qubit1.g_hz}; }

DeviceModel device_model(const ExperimentConfig& c) {
  const double g = c.qubit1.g_hz;  // every frequency divided by g (2 pi cancels)
  const double w = kTwoPi * g;     // rates divided by g in rad/s
  DeviceModel m;
  m.first.omega10 = c.qubit1.f10_hz / g;
  m.first.omega21 = c.qubit1.f21_hz / g;
  m.first.g = 1.0;
  m.first.level1 = {c.qubit1.gamma1r_per_s / w, c.qubit1.gamma1p_per_s / w};
  m.first.level2 = {c.qubit1.gamma2r_per_s / w, c.qubit1.gamma2p_per_s / w};
  m.cavity.omega = c.cavity.freq_hz / g;
  m.cavity.quality = c.cavity.quality;
  m.cavity.n_max = c.cavity.n_max;
  for (const auto& s : c.spectators) {
    SpectatorQubit q;
    q.omega10 = s.f10_hz / g;
    q.omega21 = s.f21_hz / g;
    q.g = s.g_hz / g;
    q.omega32 = s.f32_hz ? *s.f32_hz / g : m.cavity.omega + *s.cavity_detuning_ratio * q.g - q.omega21;
    q.level1 = {s.gamma1r_per_s / w, s.gamma1p_per_s / w};
    m.spectators.push_back(q);
  }
  m.validate();
  return m;
}

PropagatorConfig propagator_config(const ExperimentConfig& c) {
  PropagatorConfig p;
  p.method = parse_propagator_method(c.propagator.method);
  p.krylov_dim = c.propagator.krylov_dim;
  p.tolerance = c.propagator.tolerance;
  p.step = c.propagator.step_gt;
  p.timedep_tolerance = c.propagator.timedep_tolerance;
  p.max_refinements = c.propagator.max_refinements;
  return p;
}

ProtocolOptions protocol_options(const ExperimentConfig& c, Mode mode) {
  ProtocolOptions o;
  o.mode = mode;
  o.propagator = propagator_config(c);
  o.first_qubit_jc_in_step2 = c.protocol.first_qubit_jc_in_step2;
  o.spectator_cavity_in_steps13 = c.protocol.spectator_cavity_in_steps13;
  o.jc_during_pulses = c.protocol.jc_during_pulses;
  o.samples_per_segment = c.protocol.samples_per_segment;
  return o;
}

}  // namespace ghzcav
