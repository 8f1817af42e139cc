#include "hilft/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "hilft/error.hpp"
#include "hilft/psychrometrics.hpp"

namespace hilft {

using nlohmann::json;

namespace {

// --- enum text tables -------------------------------------------------------

template <class E>
struct EnumNames;

template <>
struct EnumNames<RunMode> {
  static constexpr std::array<std::pair<RunMode, const char*>, 2> table{
      {{RunMode::fast, "fast"}, {RunMode::realtime, "realtime"}}};
};
template <>
struct EnumNames<OverrunPolicy> {
  static constexpr std::array<std::pair<OverrunPolicy, const char*>, 2> table{
      {{OverrunPolicy::skip_and_hold, "skip_and_hold"}, {OverrunPolicy::abort, "abort"}}};
};
template <>
struct EnumNames<PvMode> {
  static constexpr std::array<std::pair<PvMode, const char*>, 2> table{
      {{PvMode::method1_emulated_pv, "method1_emulated_pv"},
       {PvMode::method2_simulated_pv, "method2_simulated_pv"}}};
};
template <>
struct EnumNames<OutdoorKind> {
  static constexpr std::array<std::pair<OutdoorKind, const char*>, 2> table{
      {{OutdoorKind::air, "air"}, {OutdoorKind::water, "water"}}};
};
template <>
struct EnumNames<GebMode> {
  static constexpr std::array<std::pair<GebMode, const char*>, 4> table{
      {{GebMode::efficiency, "efficiency"},
       {GebMode::shed, "shed"},
       {GebMode::shift, "shift"},
       {GebMode::modulate, "modulate"}}};
};
template <>
struct EnumNames<SupervisorKind> {
  static constexpr std::array<std::pair<SupervisorKind, const char*>, 2> table{
      {{SupervisorKind::rbc, "rbc"}, {SupervisorKind::slow, "slow"}}};
};

template <class E>
concept NamedEnum = requires { EnumNames<E>::table; };

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// --- reading ----------------------------------------------------------------

class Reader {
 public:
  Reader(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_null() && !node_->is_object()) {
      throw ValidationError(path_, "expected an object");
    }
  }

  template <class T>
  void operator()(const char* key, T& field) {
    seen_.insert(key);
    const json* v = find(key);
    if (!v) return;
    read(*v, join_path(path_, key), field);
  }

  template <class F>
  void block(const char* key, F&& fn) {
    seen_.insert(key);
    Reader child(find(key), join_path(path_, key));
    fn(child);
    child.finish();
  }

  template <class T, class F>
  void list(const char* key, std::vector<T>& items, F&& fn) {
    seen_.insert(key);
    const json* v = find(key);
    if (!v || v->is_null()) return;
    const std::string path = join_path(path_, key);
    if (!v->is_array()) throw ValidationError(path, "expected an array");
    items.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      T item{};
      Reader child(&(*v)[i], path + "[" + std::to_string(i) + "]");
      fn(child, item);
      child.finish();
      items.push_back(std::move(item));
    }
  }

  void finish() const {
    if (!node_ || node_->is_null()) return;
    for (const auto& [k, _] : node_->items()) {
      if (!seen_.count(k)) throw ValidationError(join_path(path_, k), "unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json* find(const char* key) const {
    if (!node_ || node_->is_null()) return nullptr;
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  static void read(const json& v, const std::string& path, double& out) {
    if (!v.is_number()) throw ValidationError(path, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ValidationError(path, "must be finite");
  }
  static void read(const json& v, const std::string& path, std::int64_t& out) {
    if (v.is_number_integer()) {
      out = v.get<std::int64_t>();
      return;
    }
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) {
        out = static_cast<std::int64_t>(d);
        return;
      }
    }
    throw ValidationError(path, "expected an integer");
  }
  static void read(const json& v, const std::string& path, std::uint64_t& out) {
    std::int64_t tmp = 0;
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
      return;
    }
    read(v, path, tmp);
    if (tmp < 0) throw ValidationError(path, "must be >= 0");
    out = static_cast<std::uint64_t>(tmp);
  }
  static void read(const json& v, const std::string& path, bool& out) {
    if (!v.is_boolean()) throw ValidationError(path, "expected true or false");
    out = v.get<bool>();
  }
  static void read(const json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) throw ValidationError(path, "expected a string");
    out = v.get<std::string>();
  }
  static void read(const json& v, const std::string& path, std::optional<double>& out) {
    if (v.is_null()) {
      out.reset();
      return;
    }
    double d = 0.0;
    read(v, path, d);
    out = d;
  }
  template <class T>
  static void read(const json& v, const std::string& path, std::vector<T>& out) {
    if (!v.is_array()) throw ValidationError(path, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T item{};
      read(v[i], path + "[" + std::to_string(i) + "]", item);
      out.push_back(std::move(item));
    }
  }
  template <NamedEnum E>
  static void read(const json& v, const std::string& path, E& out) {
    if (v.is_string()) {
      const auto text = v.get<std::string>();
      for (const auto& [value, name] : EnumNames<E>::table) {
        if (text == name) {
          out = value;
          return;
        }
      }
    }
    std::string allowed;
    for (const auto& [value, name] : EnumNames<E>::table) {
      allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw ValidationError(path, "expected one of: " + allowed);
  }

  const json* node_;
  std::string path_;
  std::set<std::string> seen_;
};

// --- writing ----------------------------------------------------------------

class Writer {
 public:
  explicit Writer(json* node) : node_(node) { *node_ = json::object(); }

  template <class T>
  void operator()(const char* key, T& field) {
    (*node_)[key] = write(field);
  }

  template <class F>
  void block(const char* key, F&& fn) {
    Writer child(&(*node_)[key]);
    fn(child);
  }

  template <class T, class F>
  void list(const char* key, std::vector<T>& items, F&& fn) {
    json arr = json::array();
    for (auto& item : items) {
      json obj;
      Writer child(&obj);
      fn(child, item);
      arr.push_back(std::move(obj));
    }
    (*node_)[key] = std::move(arr);
  }

 private:
  template <class T>
  static json write(const T& v) {
    if constexpr (NamedEnum<T>) {
      for (const auto& [value, name] : EnumNames<T>::table) {
        if (value == v) return name;
      }
      return nullptr;
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      return v ? json(*v) : json(nullptr);
    } else {
      return json(v);
    }
  }

  json* node_;
};

// --- schema -----------------------------------------------------------------
// One visitor per block drives both reading and writing, so key names live
// in one place.

template <class V>
void visit_gains(V& v, PidGains& g) {
  v("kp", g.kp);
  v("ki", g.ki);
  v("kd", g.kd);
}

template <class V>
void visit_point(V& v, Point3& p) {
  v("x", p.x);
  v("y", p.y);
  v("z", p.z);
}

template <class V>
void visit_run(V& v, RunBlock& r) {
  v("id", r.id);
  v("step_size_s", r.step_size_s);
  v("horizon", r.horizon);
  v("mode", r.mode);
  v("seed", r.seed);
}

template <class V>
void visit_delays(V& v, DelayBlock& d) {
  v("comm_latency_s", d.comm_latency_s);
  v("jitter_s", d.jitter_s);
  v("inherited_delay", d.inherited_delay);
  v("stale_hold", d.stale_hold);
  v("simulate_delay_s", d.simulate_delay_s);
  v("simulate_delay_steps", d.simulate_delay_steps);
  v("overrun_policy", d.overrun_policy);
}

template <class V>
void visit_plant(V& v, PlantBlock& p) {
  auto& pp = p.params;
  v("tick_s", pp.tick_s);
  v("duct_delay_s", pp.duct_delay_s);
  v("pv_mode", pp.pv_mode);
  v.block("hvac", [&](auto& h) {
    auto& x = pp.hvac;
    h.block("cooling_gains", [&](auto& g) { visit_gains(g, x.cooling_gains); });
    h.block("heating_gains", [&](auto& g) { visit_gains(g, x.heating_gains); });
    h("min_flow_kg_s", x.min_flow_kg_s);
    h("max_flow_kg_s", x.max_flow_kg_s);
    h("reheat_delta_k", x.reheat_delta_k);
    h("supply_humidity_ratio", x.supply_humidity_ratio);
    h("actuator_tau_s", x.actuator_tau_s);
    h("min_discharge_c", x.min_discharge_c);
    h("max_discharge_c", x.max_discharge_c);
    h("rated_capacity_w", x.rated_capacity_w);
  });
  v.block("emulator", [&](auto& e) {
    auto& x = pp.emulator;
    e("capacitance_j_per_k", x.capacitance_j_per_k);
    e("moisture_mass_kg", x.moisture_mass_kg);
    e("heater_w", x.heater_w);
    e("cooling_w", x.cooling_w);
    e("humidifier_kg_s", x.humidifier_kg_s);
    e.block("temperature_gains", [&](auto& g) { visit_gains(g, x.temperature_gains); });
    e.block("humidity_gains", [&](auto& g) { visit_gains(g, x.humidity_gains); });
    e("ideal", x.ideal);
  });
  v.block("outdoor", [&](auto& o) {
    auto& x = pp.outdoor;
    o("kind", x.kind);
    o("tau_s", x.tau_s);
    o("t_min_c", x.envelope.t_min_c);
    o("t_max_c", x.envelope.t_max_c);
    o("rh_min_pct", x.envelope.rh_min_pct);
    o("rh_max_pct", x.envelope.rh_max_pct);
  });
  v.block("initial", [&](auto& i) {
    i("zone_temperature_c", p.initial.zone_temperature_c);
    i("discharge_flow_kg_s", p.initial.discharge_flow_kg_s);
    i("emulator_heat_w", p.initial.emulator_heat_w);
  });
}

template <class V>
void visit_building(V& v, BuildingBlock& b) {
  auto& z = b.zone;
  v("capacitance_j_per_k", z.capacitance_j_per_k);
  v("ua_w_per_k", z.ua_w_per_k);
  v("moisture_capacitance_kg", z.moisture_capacitance_kg);
  v("infiltration_kg_s", z.infiltration_kg_s);
  v("internal_gains_w", z.internal_gains_w);
  v("internal_gains_schedule_w", z.internal_gains_schedule_w);
  v("surface_count", z.surface_count);
  v("surface_tau_s", z.surface_tau_s);
  v("initial_temperature_c", b.initial_temperature_c);
  v("initial_rh_pct", b.initial_rh_pct);
  v.block("weather", [&](auto& w) {
    w("file", b.weather.file);
    w("constant_tdb_c", b.weather.constant_tdb_c);
    w("constant_rh_pct", b.weather.constant_rh_pct);
  });
}

template <class V>
void visit_agent(V& v, OccupantAgent& a) {
  v("id", a.id);
  v.block("coords", [&](auto& c) { visit_point(c, a.coords); });
  v("clo", a.clo);
  v("clo_min", a.clo_min);
  v("clo_max", a.clo_max);
  v("t_pref_c", a.t_pref_c);
  v("deadband_c", a.deadband_c);
  v.block("probabilities", [&](auto& p) {
    for (ActionType t : kAllActions) {
      const std::string name(to_string(t));
      p(name.c_str(), a.action_probs[static_cast<std::size_t>(t)]);
    }
  });
  v("present_from_s", a.present_from_s);
  v("present_until_s", a.present_until_s);
}

template <class V>
void visit_occupants(V& v, OccupantBlock& o) {
  v.list("agents", o.agents, [](auto& av, OccupantAgent& a) { visit_agent(av, a); });
  v.block("surrogate", [&](auto& s) {
    auto& x = o.surrogate;
    s("discharge_weight", x.discharge_weight);
    s("decay_length_m", x.decay_length_m);
    s("surface_weight", x.surface_weight);
    s.block("diffuser", [&](auto& p) { visit_point(p, x.diffuser); });
    s.block("zone_min", [&](auto& p) { visit_point(p, x.zone_min); });
    s.block("zone_max", [&](auto& p) { visit_point(p, x.zone_max); });
  });
  v.block("effects", [&](auto& e) {
    auto& x = o.effects;
    e("fan_offset_c", x.fan_offset_c);
    e("clo_step", x.clo_step);
    e("clo_to_temp_c", x.clo_to_temp_c);
    e("clo_nominal", x.clo_nominal);
    e("drink_offset_c", x.drink_offset_c);
    e("drink_duration_s", x.drink_duration_s);
    e("walk_offset_c", x.walk_offset_c);
    e("walk_duration_s", x.walk_duration_s);
    e("thermostat_step_c", x.thermostat_step_c);
    e("heater_w", x.heater_w);
    e("walk_extra_w", x.walk_extra_w);
    e("metabolic_sensible_w", x.metabolic_sensible_w);
    e("metabolic_latent_w", x.metabolic_latent_w);
  });
  v("thermostat_band_c", o.thermostat_band_c);
}

template <class V>
void visit_geb(V& v, GebBlock& g) {
  auto& r = g.rbc;
  v("mode", r.mode);
  v.list("windows", r.windows, [](auto& wv, EventWindow& w) {
    wv("start_s", w.start_s);
    wv("end_s", w.end_s);
    wv("magnitude", w.magnitude);
  });
  v("delta_eff_c", r.delta_eff_c);
  v("delta_shed_c", r.delta_shed_c);
  v("delta_pre_c", r.delta_pre_c);
  v("pre_window_s", r.pre_window_s);
  v("modulation_depth_c", r.modulation_depth_c);
  v("rate_limit_c_per_step", r.rate_limit_c_per_step);
  v("min_setpoint_c", r.min_setpoint_c);
  v("max_setpoint_c", r.max_setpoint_c);
  v("min_gap_c", r.min_gap_c);
  v("modulation_signal", g.modulation_signal);
  v.block("baseline", [&](auto& b) {
    b("cooling_c", g.baseline.cooling_c);
    b("heating_c", g.baseline.heating_c);
    b("discharge_c", g.baseline.discharge_c);
    b("static_pressure_pa", g.baseline.static_pressure_pa);
  });
  v("controller", g.controller);
  v("compute_latency_s", g.compute_latency_s);
  v("freshness_s", g.freshness_s);
}

template <class V>
void visit_logging(V& v, LoggingBlock& l) {
  v("hardware_log", l.hardware_log);
  v("exclude", l.exclude);
}

template <class V>
void visit_scenario(V& v, Scenario& s) {
  v.block("run", [&](auto& b) { visit_run(b, s.run); });
  v.block("delays", [&](auto& b) { visit_delays(b, s.delays); });
  v.block("plant", [&](auto& b) { visit_plant(b, s.plant); });
  v.block("building", [&](auto& b) { visit_building(b, s.building); });
  v.block("occupants", [&](auto& b) { visit_occupants(b, s.occupants); });
  v.block("geb", [&](auto& b) { visit_geb(b, s.geb); });
  v.block("logging", [&](auto& b) { visit_logging(b, s.logging); });
}

// --- cross-field checks -----------------------------------------------------

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ValidationError(path, what);
}

bool whole_multiple(double value, double unit) {
  const double n = value / unit;
  return std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, std::abs(n));
}

void check(const Scenario& s) {
  const auto& r = s.run;
  require(r.step_size_s > 0.0, "run.step_size_s", "must be > 0");
  require(r.horizon >= 1, "run.horizon", "must be >= 1");
  require(!r.id.empty() && r.id.find_first_of(",\n\r") == std::string::npos, "run.id",
          "must be non-empty without commas or newlines");

  const auto& d = s.delays;
  require(d.comm_latency_s >= 0.0, "delays.comm_latency_s", "must be >= 0");
  require(d.jitter_s >= 0.0, "delays.jitter_s", "must be >= 0");
  require(d.simulate_delay_s >= 0.0, "delays.simulate_delay_s", "must be >= 0");
  if (!d.stale_hold) {
    require(d.comm_latency_s + 2.0 * d.jitter_s < r.step_size_s, "delays.comm_latency_s",
            "latency plus jitter must stay below one step (" + std::to_string(r.step_size_s) +
                " s) unless delays.stale_hold is set");
  }

  const auto& p = s.plant.params;
  require(p.tick_s > 0.0, "plant.tick_s", "must be > 0");
  require(whole_multiple(r.step_size_s, p.tick_s), "plant.tick_s",
          "must divide run.step_size_s");
  require(p.duct_delay_s >= 0.0 && whole_multiple(p.duct_delay_s, p.tick_s),
          "plant.duct_delay_s", "must be a non-negative multiple of plant.tick_s");
  const auto& h = p.hvac;
  require(h.min_flow_kg_s >= 0.0 && h.min_flow_kg_s < h.max_flow_kg_s,
          "plant.hvac.min_flow_kg_s", "needs 0 <= min_flow_kg_s < max_flow_kg_s");
  require(h.min_discharge_c < h.max_discharge_c, "plant.hvac.min_discharge_c",
          "must be below max_discharge_c");
  require(h.actuator_tau_s >= 0.0, "plant.hvac.actuator_tau_s", "must be >= 0");
  require(h.rated_capacity_w > 0.0, "plant.hvac.rated_capacity_w", "must be > 0");
  const auto& e = p.emulator;
  require(e.capacitance_j_per_k > 0.0, "plant.emulator.capacitance_j_per_k", "must be > 0");
  require(e.moisture_mass_kg > 0.0, "plant.emulator.moisture_mass_kg", "must be > 0");
  require(e.heater_w >= 0.0, "plant.emulator.heater_w", "must be >= 0");
  require(e.cooling_w >= 0.0, "plant.emulator.cooling_w", "must be >= 0");
  require(e.humidifier_kg_s >= 0.0, "plant.emulator.humidifier_kg_s", "must be >= 0");
  const auto& env = p.outdoor.envelope;
  require(env.t_min_c <= env.t_max_c, "plant.outdoor.t_min_c", "must not exceed t_max_c");
  require(env.rh_min_pct <= env.rh_max_pct && env.rh_min_pct >= 0.0 && env.rh_max_pct <= 100.0,
          "plant.outdoor.rh_min_pct", "needs 0 <= rh_min_pct <= rh_max_pct <= 100");
  require(p.outdoor.tau_s >= 0.0, "plant.outdoor.tau_s", "must be >= 0");

  const auto& b = s.building;
  require(b.zone.capacitance_j_per_k > 0.0, "building.capacitance_j_per_k", "must be > 0");
  require(b.zone.ua_w_per_k >= 0.0, "building.ua_w_per_k", "must be >= 0");
  require(b.zone.moisture_capacitance_kg > 0.0, "building.moisture_capacitance_kg",
          "must be > 0");
  require(b.initial_rh_pct >= 0.0 && b.initial_rh_pct <= 100.0, "building.initial_rh_pct",
          "must be within [0, 100]");

  const auto& o = s.occupants;
  std::set<std::uint64_t> ids;
  for (std::size_t i = 0; i < o.agents.size(); ++i) {
    const auto& a = o.agents[i];
    const std::string base = "occupants.agents[" + std::to_string(i) + "]";
    require(ids.insert(a.id).second, base + ".id", "duplicate agent id");
    for (ActionType t : kAllActions) {
      const double prob = a.probability(t);
      require(prob >= 0.0 && prob <= 1.0,
              base + ".probabilities." + std::string(to_string(t)),
              "probability must be within [0, 1]");
    }
    require(a.clo_min <= a.clo && a.clo <= a.clo_max, base + ".clo",
            "must lie within [clo_min, clo_max]");
    require(a.deadband_c >= 0.0, base + ".deadband_c", "must be >= 0");
  }
  const auto& sg = o.surrogate;
  require(sg.discharge_weight >= 0.0 && sg.discharge_weight <= 1.0,
          "occupants.surrogate.discharge_weight", "must be within [0, 1]");
  require(sg.surface_weight >= 0.0 && sg.surface_weight <= 1.0,
          "occupants.surrogate.surface_weight", "must be within [0, 1]");
  require(o.thermostat_band_c >= 0.0, "occupants.thermostat_band_c", "must be >= 0");

  const auto& g = s.geb;
  const auto& rb = g.rbc;
  require(rb.min_setpoint_c < rb.max_setpoint_c, "geb.min_setpoint_c",
          "must be below max_setpoint_c");
  require(rb.min_gap_c >= 0.0, "geb.min_gap_c", "must be >= 0");
  require(g.baseline.heating_c + rb.min_gap_c <= g.baseline.cooling_c, "geb.baseline.heating_c",
          "must sit at least min_gap_c below the cooling setpoint");
  require(g.baseline.heating_c >= rb.min_setpoint_c && g.baseline.cooling_c <= rb.max_setpoint_c,
          "geb.baseline", "must lie within [min_setpoint_c, max_setpoint_c]");
  require(rb.rate_limit_c_per_step >= 0.0, "geb.rate_limit_c_per_step", "must be >= 0");
  require(rb.pre_window_s >= 0.0, "geb.pre_window_s", "must be >= 0");
  for (std::size_t i = 0; i < rb.windows.size(); ++i) {
    const auto& w = rb.windows[i];
    const std::string base = "geb.windows[" + std::to_string(i) + "]";
    require(w.start_s < w.end_s, base, "start_s must be before end_s");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& u = rb.windows[j];
      require(w.end_s <= u.start_s || u.end_s <= w.start_s, base, "windows overlap");
    }
  }
  for (std::size_t i = 0; i < g.modulation_signal.size(); ++i) {
    const double x = g.modulation_signal[i];
    require(x >= -1.0 && x <= 1.0, "geb.modulation_signal[" + std::to_string(i) + "]",
            "must be within [-1, 1]");
  }
  require(g.compute_latency_s >= 0.0, "geb.compute_latency_s", "must be >= 0");
  require(g.freshness_s >= 0.0, "geb.freshness_s", "must be >= 0");
  for (std::size_t i = 0; i < s.logging.exclude.size(); ++i) {
    require(!s.logging.exclude[i].empty(), "logging.exclude[" + std::to_string(i) + "]",
            "must be non-empty");
  }
}

// Steady flow and coil output holding the building's initial condition, so
// a run does not start with a large transient.
void resolve_initial(Scenario& s, const WeatherSeries& weather) {
  auto& init = s.plant.initial;
  const auto& b = s.building;
  const auto& h = s.plant.params.hvac;
  if (!init.zone_temperature_c) init.zone_temperature_c = b.initial_temperature_c;
  if (!init.discharge_flow_kg_s) {
    const double t_dis = s.geb.baseline.discharge_c;
    const double q = b.zone.ua_w_per_k * (weather.at(0).temperature_c - b.initial_temperature_c) +
                     (b.zone.internal_gains_schedule_w.empty()
                          ? b.zone.internal_gains_w
                          : b.zone.internal_gains_schedule_w.front());
    const double dt = b.initial_temperature_c - t_dis;
    const double m = dt > 0.0 ? q / (psychro::kCpAir * dt) : h.min_flow_kg_s;
    init.discharge_flow_kg_s = std::clamp(m, h.min_flow_kg_s, h.max_flow_kg_s);
  }
  if (!init.emulator_heat_w) {
    const auto& e = s.plant.params.emulator;
    const double q = *init.discharge_flow_kg_s * psychro::kCpAir *
                     (b.initial_temperature_c - s.geb.baseline.discharge_c);
    init.emulator_heat_w = std::clamp(q, -e.cooling_w, e.heater_w);
  }
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

}  // namespace

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("", "override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ValidationError(key, "empty segment in override path");
    parts.push_back(part);
  }
  json* node = &doc;
  std::string walked;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    walked = join_path(walked, p);
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(p, &used);
        if (used != p.size()) throw std::invalid_argument(p);
      } catch (const std::exception&) {
        throw ValidationError(walked, "expected an array index");
      }
      if (idx >= node->size()) throw ValidationError(walked, "array index out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ValidationError(walked, "cannot descend into a scalar");
      node = &(*node)[p];
    }
    if (last) *node = parse_override_value(assignment.substr(eq + 1));
  }
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  if (!doc.is_object()) throw ValidationError("", "scenario must be a JSON object");
  Reader root(&doc, "");
  visit_scenario(root, s);
  root.finish();

  // Envelope defaults follow the outdoor kind unless given explicitly.
  const json* outdoor = nullptr;
  if (auto p = doc.find("plant"); p != doc.end() && p->is_object()) {
    if (auto o = p->find("outdoor"); o != p->end() && o->is_object()) outdoor = &*o;
  }
  const Envelope kind_env = default_envelope(s.plant.params.outdoor.kind);
  auto& env = s.plant.params.outdoor.envelope;
  auto given = [&](const char* k) { return outdoor && outdoor->contains(k); };
  if (!given("t_min_c")) env.t_min_c = kind_env.t_min_c;
  if (!given("t_max_c")) env.t_max_c = kind_env.t_max_c;
  if (!given("rh_min_pct")) env.rh_min_pct = kind_env.rh_min_pct;
  if (!given("rh_max_pct")) env.rh_max_pct = kind_env.rh_max_pct;

  s.building.zone.inherited_delay = s.delays.inherited_delay;
  check(s);
  resolve_initial(s, scenario_weather(s));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("", "scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_scenario(doc, path.parent_path());
}

json effective_config(const Scenario& s) {
  Scenario copy = s;
  json out;
  Writer w(&out);
  visit_scenario(w, copy);
  return out;
}

WeatherSeries scenario_weather(const Scenario& s) {
  const auto& w = s.building.weather;
  if (w.file.empty()) {
    return constant_weather(OutdoorCondition{w.constant_tdb_c, w.constant_rh_pct},
                            s.run.step_size_s, s.run.horizon);
  }
  std::filesystem::path p(w.file);
  if (p.is_relative()) p = s.base_dir / p;
  try {
    return load_weather(p, s.run.step_size_s, s.run.horizon);
  } catch (const Error& e) {
    throw ValidationError("building.weather.file", e.what());
  }
}

}  // namespace hilft
