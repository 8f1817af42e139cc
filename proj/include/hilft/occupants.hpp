#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hilft/building.hpp"
#include "hilft/exchange.hpp"
#include "hilft/rng.hpp"

// Agent-based occupants: local condition surrogate, band discomfort,
// probabilistic adaptive actions, and the gains they return to the zone.
namespace hilft {

enum class ActionType {
  heater_toggle,
  fan_toggle,
  thermostat_adjust,
  clothing_adjust,
  drink,
  walk,
};

inline constexpr std::array<ActionType, 6> kAllActions{
    ActionType::heater_toggle,     ActionType::fan_toggle, ActionType::thermostat_adjust,
    ActionType::clothing_adjust,   ActionType::drink,      ActionType::walk};

std::string_view to_string(ActionType a);
std::optional<ActionType> parse_action(std::string_view text);

// Effect magnitudes; defaults are configuration, not measured values.
struct ActionEffects {
  double fan_offset_c = -0.8;
  double clo_step = 0.5;
  double clo_to_temp_c = 2.0;  // effective degC per clo above the nominal level
  double clo_nominal = 0.7;
  double drink_offset_c = 0.5;
  double drink_duration_s = 900.0;
  double walk_offset_c = 0.3;
  double walk_duration_s = 300.0;
  double thermostat_step_c = 0.5;
  double heater_w = 800.0;
  double walk_extra_w = 100.0;
  double metabolic_sensible_w = 75.0;
  double metabolic_latent_w = 55.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct OccupantAgent {
  std::uint64_t id = 0;
  Point3 coords;
  double clo = 0.7;
  double clo_min = 0.3;
  double clo_max = 1.5;
  double t_pref_c = 22.0;
  double deadband_c = 1.0;
  std::array<double, 6> action_probs{};  // indexed by ActionType
  bool heater_on = false;
  bool fan_on = false;
  double drink_offset_c = 0.0;  // signed offset at drink start
  double drink_timer_s = 0.0;
  double walk_timer_s = 0.0;
  double thermostat_delta_c = 0.0;
  std::optional<double> present_from_s;
  std::optional<double> present_until_s;

  double probability(ActionType a) const { return action_probs[static_cast<std::size_t>(a)]; }
  bool present_at(double t_s) const;
};

// Linear stand-in for a CFD-trained airflow model. Weights form a convex
// combination, so equal inputs give that same temperature back.
struct NearOccupantSurrogate {
  double discharge_weight = 0.3;   // weight of discharge air at the diffuser
  double decay_length_m = 0.0;     // <= 0 disables the distance falloff
  double surface_weight = 0.0;     // share of the remainder taken by mean surface temp
  Point3 diffuser;
  Point3 zone_min{0.0, 0.0, 0.0};
  Point3 zone_max{10.0, 10.0, 3.0};
};

struct LocalCondition {
  double temperature_c = 0.0;            // convex combination of inputs
  double rh_pct = 0.0;
  double effective_temperature_c = 0.0;  // after the fan offset
  bool clamped = false;                  // coords were outside the zone
};

LocalCondition local_condition(const NearOccupantSurrogate& s, const DischargeAir& discharge,
                               const ZoneState& zone, const Point3& coords, bool fan_on,
                               const ActionEffects& effects = {});

// Signed distance of the effective temperature (fan, clothing, drink and
// walk offsets applied) beyond [T_pref - deadband, T_pref + deadband].
// Negative means too cold.
double comfort_eval(const OccupantAgent& a, const LocalCondition& local,
                    const ActionEffects& effects = {});

// Decays drink and walk timers by dt.
void advance_timers(OccupantAgent& a, double dt, const ActionEffects& effects = {});

struct BehaviorOutcome {
  std::vector<ActionType> actions;
  OccupantAgent agent;
};

// Every action draws once from `rng` in enumeration order; an action fires
// when it is applicable to the sign of the discomfort and its draw is below
// the configured probability. Nothing fires when score == 0.
BehaviorOutcome behave(const OccupantAgent& a, double score, CounterStream& rng,
                       const ActionEffects& effects = {});

// Sums in agent order. thermostat_delta is the mean agent delta clamped to
// +-thermostat_band_c.
OccupantGains aggregate_gains(const std::vector<OccupantAgent>& agents, double t_s,
                              double thermostat_band_c = 2.0,
                              const ActionEffects& effects = {});

}  // namespace hilft
