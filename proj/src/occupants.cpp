#include "hilft/occupants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hilft {

std::string_view to_string(ActionType a) {
  switch (a) {
    case ActionType::heater_toggle: return "heater_toggle";
    case ActionType::fan_toggle: return "fan_toggle";
    case ActionType::thermostat_adjust: return "thermostat_adjust";
    case ActionType::clothing_adjust: return "clothing_adjust";
    case ActionType::drink: return "drink";
    case ActionType::walk: return "walk";
  }
  return "unknown";
}

std::optional<ActionType> parse_action(std::string_view text) {
  for (auto a : kAllActions) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

bool OccupantAgent::present_at(double t_s) const {
  if (present_from_s && t_s < *present_from_s) return false;
  if (present_until_s && t_s >= *present_until_s) return false;
  return true;
}

LocalCondition local_condition(const NearOccupantSurrogate& s, const DischargeAir& discharge,
                               const ZoneState& zone, const Point3& coords, bool fan_on,
                               const ActionEffects& effects) {
  LocalCondition out;
  Point3 p{std::clamp(coords.x, s.zone_min.x, s.zone_max.x),
           std::clamp(coords.y, s.zone_min.y, s.zone_max.y),
           std::clamp(coords.z, s.zone_min.z, s.zone_max.z)};
  out.clamped = p.x != coords.x || p.y != coords.y || p.z != coords.z;

  double wd = std::clamp(s.discharge_weight, 0.0, 1.0);
  if (s.decay_length_m > 0.0) {
    const double d = std::hypot(p.x - s.diffuser.x, p.y - s.diffuser.y, p.z - s.diffuser.z);
    wd *= std::exp(-d / s.decay_length_m);
  }
  double ws = zone.surface_temps_c.empty() ? 0.0 : std::clamp(s.surface_weight, 0.0, 1.0);
  const double surface_mean =
      zone.surface_temps_c.empty()
          ? 0.0
          : std::accumulate(zone.surface_temps_c.begin(), zone.surface_temps_c.end(), 0.0) /
                static_cast<double>(zone.surface_temps_c.size());

  const double room = (1.0 - ws) * zone.temperature_c + ws * surface_mean;
  out.temperature_c = wd * discharge.temperature_c + (1.0 - wd) * room;
  out.rh_pct = std::clamp(wd * discharge.rh_pct + (1.0 - wd) * zone.rh_pct, 0.0, 100.0);
  out.effective_temperature_c = out.temperature_c + (fan_on ? effects.fan_offset_c : 0.0);
  return out;
}

namespace {

double drink_now(const OccupantAgent& a, const ActionEffects& e) {
  if (a.drink_timer_s <= 0.0 || e.drink_duration_s <= 0.0) return 0.0;
  return a.drink_offset_c * std::min(a.drink_timer_s / e.drink_duration_s, 1.0);
}

}  // namespace

double comfort_eval(const OccupantAgent& a, const LocalCondition& local,
                    const ActionEffects& effects) {
  double t = local.effective_temperature_c;
  t += (a.clo - effects.clo_nominal) * effects.clo_to_temp_c;
  t += drink_now(a, effects);
  if (a.walk_timer_s > 0.0) t += effects.walk_offset_c;
  const double lo = a.t_pref_c - a.deadband_c;
  const double hi = a.t_pref_c + a.deadband_c;
  if (t > hi) return t - hi;
  if (t < lo) return t - lo;
  return 0.0;
}

void advance_timers(OccupantAgent& a, double dt, const ActionEffects&) {
  a.drink_timer_s = std::max(a.drink_timer_s - dt, 0.0);
  if (a.drink_timer_s == 0.0) a.drink_offset_c = 0.0;
  a.walk_timer_s = std::max(a.walk_timer_s - dt, 0.0);
}

BehaviorOutcome behave(const OccupantAgent& a, double score, CounterStream& rng,
                       const ActionEffects& e) {
  BehaviorOutcome out{{}, a};
  OccupantAgent& ag = out.agent;
  const bool hot = score > 0.0;
  const bool cold = score < 0.0;
  for (ActionType action : kAllActions) {
    const double u = rng.uniform();
    if (!hot && !cold) continue;
    if (!(u < ag.probability(action))) continue;
    bool fired = false;
    switch (action) {
      case ActionType::heater_toggle:
        if ((cold && !ag.heater_on) || (hot && ag.heater_on)) {
          ag.heater_on = !ag.heater_on;
          fired = true;
        }
        break;
      case ActionType::fan_toggle:
        if ((hot && !ag.fan_on) || (cold && ag.fan_on)) {
          ag.fan_on = !ag.fan_on;
          fired = true;
        }
        break;
      case ActionType::thermostat_adjust:
        ag.thermostat_delta_c += hot ? -e.thermostat_step_c : e.thermostat_step_c;
        fired = true;
        break;
      case ActionType::clothing_adjust: {
        const double next = std::clamp(ag.clo + (hot ? -e.clo_step : e.clo_step), ag.clo_min,
                                       ag.clo_max);
        if (next != ag.clo) {
          ag.clo = next;
          fired = true;
        }
        break;
      }
      case ActionType::drink:
        if (ag.drink_timer_s <= 0.0) {
          ag.drink_offset_c = hot ? -e.drink_offset_c : e.drink_offset_c;
          ag.drink_timer_s = e.drink_duration_s;
          fired = true;
        }
        break;
      case ActionType::walk:
        if (cold && ag.walk_timer_s <= 0.0) {
          ag.walk_timer_s = e.walk_duration_s;
          fired = true;
        }
        break;
    }
    if (fired) out.actions.push_back(action);
  }
  return out;
}

OccupantGains aggregate_gains(const std::vector<OccupantAgent>& agents, double t_s,
                              double thermostat_band_c, const ActionEffects& e) {
  OccupantGains g;
  if (agents.empty()) return g;
  double delta_sum = 0.0;
  for (const auto& a : agents) {
    delta_sum += a.thermostat_delta_c;
    if (!a.present_at(t_s)) continue;
    g.sensible_w += e.metabolic_sensible_w;
    if (a.heater_on) g.sensible_w += e.heater_w;
    if (a.walk_timer_s > 0.0) g.sensible_w += e.walk_extra_w;
    g.latent_w += e.metabolic_latent_w;
  }
  g.thermostat_delta_c = std::clamp(delta_sum / static_cast<double>(agents.size()),
                                    -thermostat_band_c, thermostat_band_c);
  return g;
}

}  // namespace hilft
