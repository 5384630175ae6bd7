#include "stsmc/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stsmc/error.hpp"

namespace stsmc {

namespace {

struct Value {
  enum class Kind { number, string, boolean } kind = Kind::number;
  double num = 0.0;
  std::string str;
  bool flag = false;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  std::string t;
  for (char c : text)
    if (c != '_') t += c;
  if (t == "inf" || t == "+inf" || t == "-inf" || t == "nan" || t == "+nan" || t == "-nan") return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end != t.c_str() && *end == '\0';
}

bool parse_value(const std::string& text, Value& v) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    v.kind = Value::Kind::string;
    v.str = text.substr(1, text.size() - 2);
    return v.str.find('"') == std::string::npos;
  }
  if (text == "true" || text == "false") {
    v.kind = Value::Kind::boolean;
    v.flag = text == "true";
    return true;
  }
  v.kind = Value::Kind::number;
  return parse_number(text, v.num);
}

double as_number(const Value& v, const std::string& key, int line) {
  if (v.kind != Value::Kind::number) throw ConfigError(key, line, "expected a number");
  return v.num;
}

long as_integer(const Value& v, const std::string& key, int line) {
  const double d = as_number(v, key, line);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(key, line, "expected an integer");
  return long(d);
}

const std::string& as_string(const Value& v, const std::string& key, int line) {
  if (v.kind != Value::Kind::string) throw ConfigError(key, line, "expected a string");
  return v.str;
}

using Setter = std::function<void(ScenarioConfig&, const Value&, const std::string&, int)>;

Setter num(double ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const Value& v, const std::string& k, int l) { c.*field = as_number(v, k, l); };
}

template <class Get>
Setter num_at(Get get) {
  return [get](ScenarioConfig& c, const Value& v, const std::string& k, int l) { get(c) = as_number(v, k, l); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    m["id"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) { c.id = as_string(v, k, l); };
    m["u0_ref"] = num(&ScenarioConfig::u0_ref);
    m["u0_initial"] = num(&ScenarioConfig::u0_initial);
    m["i_d_initial"] = num(&ScenarioConfig::i_d_initial);
    m["i_q_initial"] = num(&ScenarioConfig::i_q_initial);
    m["t_end"] = num(&ScenarioConfig::t_end);
    m["dt"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      c.dt = as_number(v, k, l);
      if (!(c.dt > 0.0)) throw ConfigError(k, l, "must be > 0 (omit for the mode default)");
    };
    m["carrier_freq"] = num(&ScenarioConfig::carrier_freq);
    m["noise_std"] = num(&ScenarioConfig::noise_std);
    m["control_period"] = num(&ScenarioConfig::control_period);
    m["u0_floor"] = num(&ScenarioConfig::u0_floor);
    m["ref_derivative_tau"] = num(&ScenarioConfig::ref_derivative_tau);
    m["substeps_per_carrier"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      c.substeps_per_carrier = int(as_integer(v, k, l));
    };
    m["decimate"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      c.decimate = int(as_integer(v, k, l));
    };
    m["seed"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      const long s = as_integer(v, k, l);
      if (s < 0) throw ConfigError(k, l, "must be >= 0");
      c.seed = std::uint64_t(s);
    };
    m["mode"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      const std::string& s = as_string(v, k, l);
      if (s == "averaged")
        c.mode = SimMode::averaged;
      else if (s == "switched")
        c.mode = SimMode::switched;
      else
        throw ConfigError(k, l, "expected \"averaged\" or \"switched\"");
    };
    m["controller"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      const std::string& s = as_string(v, k, l);
      if (s == "st" || s == "st_observer_based")
        c.controller = ControllerKind::st;
      else if (s == "pi" || s == "pi_baseline")
        c.controller = ControllerKind::pi;
      else if (s == "ideal" || s == "ideal_current_loop")
        c.controller = ControllerKind::ideal;
      else if (s == "fixed")
        c.controller = ControllerKind::fixed;
      else
        throw ConfigError(k, l, "expected one of st, pi, ideal, fixed");
    };

    m["params.r"] = num_at([](ScenarioConfig& c) -> double& { return c.params.r; });
    m["params.l_ind"] = num_at([](ScenarioConfig& c) -> double& { return c.params.l_ind; });
    m["params.c_cap"] = num_at([](ScenarioConfig& c) -> double& { return c.params.c_cap; });
    m["params.r_load"] = num_at([](ScenarioConfig& c) -> double& { return c.params.r_load; });
    m["params.r_nominal"] = num_at([](ScenarioConfig& c) -> double& { return c.params.r_nominal; });
    m["params.e_mag"] = num_at([](ScenarioConfig& c) -> double& { return c.params.e_mag; });
    m["params.omega"] = num_at([](ScenarioConfig& c) -> double& { return c.params.omega; });

    m["observer.lambda"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.gains.lambda; });
    m["observer.alpha"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.gains.alpha; });
    m["observer.f_bound"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.gains.f_bound; });
    m["observer.kappa"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.kappa; });
    m["observer.e3_threshold"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.e3_threshold; });
    m["observer.i_d_initial"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.i_d_initial; });
    m["observer.i_q_initial"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.i_q_initial; });
    m["observer.u0_initial"] = num_at([](ScenarioConfig& c) -> double& { return c.observer.u0_initial; });
    m["observer.load_model"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      const std::string& s = as_string(v, k, l);
      if (s == "actual")
        c.observer.load_model = LoadModel::actual;
      else if (s == "estimated")
        c.observer.load_model = LoadModel::estimated;
      else
        throw ConfigError(k, l, "expected \"actual\" or \"estimated\"");
    };

    m["load_observer.lambda"] = num_at([](ScenarioConfig& c) -> double& { return c.load_observer.gains.lambda; });
    m["load_observer.alpha"] = num_at([](ScenarioConfig& c) -> double& { return c.load_observer.gains.alpha; });
    m["load_observer.f_bound"] = num_at([](ScenarioConfig& c) -> double& { return c.load_observer.gains.f_bound; });
    m["load_observer.den_eps"] = num_at([](ScenarioConfig& c) -> double& { return c.load_observer.den_eps; });
    m["load_observer.filter_tau"] = num_at([](ScenarioConfig& c) -> double& { return c.load_observer.filter_tau; });

    for (const char* ch : {"d", "q"}) {
      const bool d = ch[0] == 'd';
      auto gains = [d](ScenarioConfig& c) -> StGains& { return d ? c.st_d : c.st_q; };
      m[std::string("st_control.lambda_") + ch] = num_at([gains](ScenarioConfig& c) -> double& { return gains(c).lambda; });
      m[std::string("st_control.alpha_") + ch] = num_at([gains](ScenarioConfig& c) -> double& { return gains(c).alpha; });
      m[std::string("st_control.f_bound_") + ch] =
          num_at([gains](ScenarioConfig& c) -> double& { return gains(c).f_bound; });
    }
    m["st_control.lambda"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      c.st_d.lambda = c.st_q.lambda = as_number(v, k, l);
    };
    m["st_control.alpha"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      c.st_d.alpha = c.st_q.alpha = as_number(v, k, l);
    };
    m["st_control.f_bound"] = [](ScenarioConfig& c, const Value& v, const std::string& k, int l) {
      c.st_d.f_bound = c.st_q.f_bound = as_number(v, k, l);
    };

    m["pi_control.current_bandwidth_hz"] = num_at([](ScenarioConfig& c) -> double& { return c.pi.current_bandwidth_hz; });
    m["pi_control.voltage_bandwidth_hz"] = num_at([](ScenarioConfig& c) -> double& { return c.pi.voltage_bandwidth_hz; });
    m["pi_control.voltage_damping"] = num_at([](ScenarioConfig& c) -> double& { return c.pi.voltage_damping; });
    m["pi_control.i_q_max"] = num_at([](ScenarioConfig& c) -> double& { return c.pi.i_q_max; });

    m["fixed_control.u_d"] = num_at([](ScenarioConfig& c) -> double& { return c.fixed_u.u_d; });
    m["fixed_control.u_q"] = num_at([](ScenarioConfig& c) -> double& { return c.fixed_u.u_q; });
    return m;
  }();
  return table;
}

void set_field(ScenarioConfig& cfg, const std::string& key, const Value& v, int line) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError(key, line, "unknown key");
  it->second(cfg, v, key, line);
}

struct PendingEvent {
  int line = 0;
  std::map<std::string, std::pair<Value, int>> fields;
};

Event finish_event(const PendingEvent& pe, std::size_t index) {
  const std::string base = "events[" + std::to_string(index) + "]";
  for (const char* k : {"time", "field", "value"})
    if (!pe.fields.count(k)) throw ConfigError(base + "." + k, pe.line, "missing");
  Event e;
  const auto& [tv, tl] = pe.fields.at("time");
  e.time = as_number(tv, base + ".time", tl);
  const auto& [fv, fl] = pe.fields.at("field");
  const std::string& f = as_string(fv, base + ".field", fl);
  if (f == "r_load")
    e.field = EventField::r_load;
  else if (f == "omega")
    e.field = EventField::omega;
  else
    throw ConfigError(base + ".field", fl, "expected \"r_load\" or \"omega\"");
  const auto& [vv, vl] = pe.fields.at("value");
  e.value = as_number(vv, base + ".value", vl);
  return e;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  static const std::set<std::string> tables{"params", "observer", "load_observer", "st_control", "pi_control",
                                            "fixed_control"};
  ScenarioConfig cfg;
  cfg.events.clear();
  std::map<std::string, int> key_lines;
  std::vector<PendingEvent> events;
  std::string table;
  bool in_event = false;
  std::set<std::string> seen_tables;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line == "[[events]]") {
      events.push_back(PendingEvent{line_no, {}});
      in_event = true;
      table.clear();
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3 || line[1] == '[')
        throw ConfigError("", line_no, "malformed table header");
      table = trim(line.substr(1, line.size() - 2));
      if (!tables.count(table)) throw ConfigError(table, line_no, "unknown table");
      if (!seen_tables.insert(table).second) throw ConfigError(table, line_no, "table defined twice");
      in_event = false;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string vtext = trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t\"") != std::string::npos)
      throw ConfigError(key, line_no, "malformed key");
    Value v;
    if (!parse_value(vtext, v)) throw ConfigError(key, line_no, "cannot parse value '" + vtext + "'");

    if (in_event) {
      PendingEvent& pe = events.back();
      const std::string full = "events[" + std::to_string(events.size() - 1) + "]." + key;
      if (key != "time" && key != "field" && key != "value") throw ConfigError(full, line_no, "unknown key");
      if (!pe.fields.emplace(key, std::make_pair(v, line_no)).second) throw ConfigError(full, line_no, "duplicate key");
      key_lines[full] = line_no;
      continue;
    }

    const std::string full = table.empty() ? key : table + "." + key;
    if (!key_lines.emplace(full, line_no).second) throw ConfigError(full, line_no, "duplicate key");
    set_field(cfg, full, v, line_no);
  }

  for (std::size_t i = 0; i < events.size(); ++i) cfg.events.push_back(finish_event(events[i], i));

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    if (e.line() > 0) throw;
    int line = 0;
    if (auto it = key_lines.find(e.key()); it != key_lines.end()) line = it->second;
    std::string detail = e.what();
    if (const auto p = detail.find("': "); p != std::string::npos) detail = detail.substr(p + 3);
    throw ConfigError(e.key(), line, detail);
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FileNotFoundError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  Value v;
  const std::string t = trim(value);
  if (!parse_value(t, v)) {
    if (t.empty() || t.find_first_of("\"= \t") != std::string::npos)
      throw ConfigError(key, 0, "cannot parse value '" + value + "'");
    v.kind = Value::Kind::string;
    v.str = t;
  }
  set_field(cfg, key, v, 0);
}

}  // namespace stsmc
