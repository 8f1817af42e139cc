#include "hilft/plant.hpp"

#include <algorithm>
#include <cmath>

#include "hilft/error.hpp"
#include "hilft/first_order.hpp"
#include "hilft/psychrometrics.hpp"

namespace hilft {

double DischargeAir::humidity_ratio() const {
  return psychro::humidity_ratio(temperature_c, rh_pct);
}

// ---------------------------------------------------------------------------

ZoneEmulator::ZoneEmulator(const ZoneEmulatorParams& params, double temperature_c,
                           double rh_pct)
    : params_(params),
      temperature_loop_(params.temperature_gains, -params.cooling_w, params.heater_w),
      humidity_loop_(params.humidity_gains, 0.0, params.humidifier_kg_s) {
  if (!(params.capacitance_j_per_k > 0.0)) throw DomainError("emulator capacitance must be > 0");
  if (!(params.moisture_mass_kg > 0.0)) throw DomainError("emulator moisture mass must be > 0");
  state_.temperature_c = temperature_c;
  state_.humidity_ratio = psychro::humidity_ratio(temperature_c, rh_pct);
}

void ZoneEmulator::preset_heat(double watts) {
  temperature_loop_.preset_output(watts);
  state_.heater_w = std::max(watts, 0.0);
  state_.cooling_w = std::max(-watts, 0.0);
}

double ZoneEmulator::rh_pct() const {
  return psychro::relative_humidity(state_.temperature_c, state_.humidity_ratio);
}

const ZoneEmuState& ZoneEmulator::step(const ZoneState& target, const DischargeAir& inlet,
                                       double dt) {
  if (!(dt > 0.0)) throw DomainError("emulator step requires dt > 0");
  const double target_w = psychro::humidity_ratio(target.temperature_c, target.rh_pct);
  if (params_.ideal) {
    heat_input_j_ += params_.capacitance_j_per_k * (target.temperature_c - state_.temperature_c);
    state_.temperature_c = target.temperature_c;
    state_.humidity_ratio = target_w;
    state_.saturated = false;
    return state_;
  }

  const double q = temperature_loop_.step(target.temperature_c, state_.temperature_c, dt);
  const double hum = humidity_loop_.step(target_w, state_.humidity_ratio, dt);
  state_.heater_w = std::max(q, 0.0);
  state_.cooling_w = std::max(-q, 0.0);
  state_.humidifier_kg_s = hum;
  state_.saturated = temperature_loop_.saturated() || humidity_loop_.saturated();
  if (state_.saturated) ++saturation_count_;

  const double m = std::max(inlet.mass_flow_kg_s, 0.0);
  const double c = params_.capacitance_j_per_k;
  const double g = m * psychro::kCpAir;
  const double a = (q + g * inlet.temperature_c) / c;
  const double b = g / c;
  const double t0 = state_.temperature_c;
  heat_input_j_ += q * dt + g * (inlet.temperature_c * dt - exact_linear_integral(t0, a, b, dt));
  state_.temperature_c = exact_linear_step(t0, a, b, dt);

  const double mm = params_.moisture_mass_kg;
  state_.humidity_ratio = exact_linear_step(
      state_.humidity_ratio, (hum + m * inlet.humidity_ratio()) / mm, m / mm, dt);
  return state_;
}

// ---------------------------------------------------------------------------

HvacUnit::HvacUnit(const HvacParams& params, const DischargeAir& initial)
    : params_(params),
      cooling_loop_(params.cooling_gains, 0.0, 1.0, PidAction::reverse),
      heating_loop_(params.heating_gains, 0.0, 1.0, PidAction::direct),
      discharge_(initial) {
  if (!(params.min_flow_kg_s >= 0.0 && params.min_flow_kg_s < params.max_flow_kg_s)) {
    throw DomainError("HVAC flow limits must satisfy 0 <= min < max");
  }
  const double span = params.max_flow_kg_s - params.min_flow_kg_s;
  cooling_loop_.preset_output(
      std::clamp((initial.mass_flow_kg_s - params.min_flow_kg_s) / span, 0.0, 1.0));
}

DischargeAir HvacUnit::step(PvMode mode, const ZoneEmuState& zone_emu,
                            const std::optional<ZoneState>& zone_sim,
                            const SupervisorySetpoints& setpoints, double dt) {
  if (mode == PvMode::method2_simulated_pv && !zone_sim) {
    stale_ = true;
    ++stale_count_;
    return discharge_;
  }
  stale_ = false;
  const double pv = mode == PvMode::method1_emulated_pv ? zone_emu.temperature_c
                                                         : zone_sim->temperature_c;
  const double cool = cooling_loop_.step(setpoints.cooling_c, pv, dt);
  const double heat = heating_loop_.step(setpoints.heating_c, pv, dt);

  const double flow_cmd =
      params_.min_flow_kg_s + cool * (params_.max_flow_kg_s - params_.min_flow_kg_s);
  const double temp_cmd = std::clamp(setpoints.discharge_c + heat * params_.reheat_delta_k,
                                     params_.min_discharge_c, params_.max_discharge_c);

  discharge_.temperature_c =
      first_order_lag(discharge_.temperature_c, temp_cmd, params_.actuator_tau_s, dt);
  discharge_.mass_flow_kg_s =
      first_order_lag(discharge_.mass_flow_kg_s, flow_cmd, params_.actuator_tau_s, dt);
  const double w_sat = psychro::humidity_ratio(discharge_.temperature_c, 100.0);
  const double w = std::min(params_.supply_humidity_ratio, w_sat);
  discharge_.rh_pct = psychro::relative_humidity(discharge_.temperature_c, w);
  return discharge_;
}

// ---------------------------------------------------------------------------

Envelope default_envelope(OutdoorKind kind) {
  if (kind == OutdoorKind::water) return Envelope{10.0, 55.0, 0.0, 100.0};
  return Envelope{-12.0, 65.0, 10.0, 100.0};
}

OutdoorEmulator::OutdoorEmulator(const OutdoorParams& params, const OutdoorCondition& initial)
    : params_(params), value_(initial) {
  const auto& e = params.envelope;
  if (!(e.t_min_c <= e.t_max_c) || !(e.rh_min_pct <= e.rh_max_pct)) {
    throw DomainError("outdoor envelope bounds are inverted");
  }
  value_.temperature_c = std::clamp(value_.temperature_c, e.t_min_c, e.t_max_c);
  value_.rh_pct = std::clamp(value_.rh_pct, e.rh_min_pct, e.rh_max_pct);
}

const OutdoorCondition& OutdoorEmulator::step(const OutdoorCondition& target, double dt) {
  const auto& e = params_.envelope;
  const double t = first_order_lag(value_.temperature_c, target.temperature_c, params_.tau_s, dt);
  value_.temperature_c = std::clamp(t, e.t_min_c, e.t_max_c);
  limited_ = value_.temperature_c != t;
  if (params_.kind == OutdoorKind::air) {
    const double rh = first_order_lag(value_.rh_pct, target.rh_pct, params_.tau_s, dt);
    value_.rh_pct = std::clamp(rh, e.rh_min_pct, e.rh_max_pct);
    limited_ = limited_ || value_.rh_pct != rh;
  }
  if (limited_) ++limitation_count_;
  return value_;
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t whole_ticks(double seconds, double tick_s, const char* what) {
  const double n = seconds / tick_s;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, std::abs(n))) {
    throw DomainError(std::string(what) + " must be a whole number of plant ticks");
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

Plant::Plant(const PlantParams& params, const PlantInitialState& initial,
             const PlantCommand& initial_command)
    : params_(params),
      hvac_(params.hvac, initial.discharge),
      emulator_(params.emulator, initial.zone_temperature_c, initial.zone_rh_pct),
      outdoor_(params.outdoor, initial.outdoor),
      applied_(initial_command),
      inlet_(initial.discharge) {
  if (!(params.tick_s > 0.0)) throw DomainError("plant tick must be > 0");
  emulator_.preset_heat(initial.emulator_heat_w);
  const auto delay = whole_ticks(params.duct_delay_s, params.tick_s, "duct delay");
  duct_.assign(static_cast<std::size_t>(delay), initial.discharge);
}

PlantMeasurement Plant::measure() const {
  PlantMeasurement m;
  m.discharge = inlet_;
  m.zone = emulator_.state();
  m.zone_rh_pct = emulator_.rh_pct();
  m.outdoor = outdoor_.value();
  // A delivery that has arrived by this instant governs the coming tick.
  m.applied = applied_;
  for (const auto& d : pending_) {
    if (d.tick > tick_) break;
    m.applied = d.command;
  }
  m.cooling_output = hvac_.cooling_output();
  m.heating_output = hvac_.heating_output();
  const double flow = std::max(inlet_.mass_flow_kg_s, 0.0);
  m.sensible_load_w = flow * psychro::kCpAir * (m.zone.temperature_c - inlet_.temperature_c);
  m.latent_load_w =
      flow * (m.zone.humidity_ratio - inlet_.humidity_ratio()) * psychro::kLatentHeat;
  m.outdoor_limited = interval_limited_;
  m.emulator_saturated = interval_saturated_;
  m.hvac_stale = interval_stale_;
  return m;
}

void Plant::schedule(double at_s, const PlantCommand& command) {
  const auto tick =
      static_cast<std::int64_t>(std::ceil(at_s / params_.tick_s - 1e-9));
  Delivery d{std::max(tick, tick_), command};
  auto pos = std::upper_bound(pending_.begin(), pending_.end(), d.tick,
                              [](std::int64_t t, const Delivery& x) { return t < x.tick; });
  pending_.insert(pos, std::move(d));
}

void Plant::advance(double duration_s) {
  interval_limited_ = false;
  interval_saturated_ = false;
  interval_stale_ = false;
  const auto n = whole_ticks(duration_s, params_.tick_s, "plant interval");
  for (std::int64_t i = 0; i < n; ++i) tick_once();
}

void Plant::tick_once() {
  while (!pending_.empty() && pending_.front().tick <= tick_) {
    applied_ = std::move(pending_.front().command);
    pending_.pop_front();
  }
  const double h = params_.tick_s;
  const DischargeAir outlet = hvac_.step(params_.pv_mode, emulator_.state(),
                                         std::optional<ZoneState>(applied_.zone_target),
                                         applied_.setpoints, h);
  if (duct_.empty()) {
    inlet_ = outlet;
  } else {
    duct_.push_back(outlet);
    inlet_ = duct_.front();
    duct_.pop_front();
  }
  emulator_.step(applied_.zone_target, inlet_, h);
  outdoor_.step(applied_.outdoor_target, h);
  interval_limited_ = interval_limited_ || outdoor_.limited();
  interval_saturated_ = interval_saturated_ || emulator_.state().saturated;
  interval_stale_ = interval_stale_ || hvac_.stale();
  ++tick_;
}

}  // namespace hilft
