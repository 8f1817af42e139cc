#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hilft/exchange.hpp"

// Single-node RC zone with a moisture balance, standing in for the
// building energy model on the software side.
namespace hilft {

struct OccupantGains {
  double sensible_w = 0.0;
  double latent_w = 0.0;
  double thermostat_delta_c = 0.0;

  friend bool operator==(const OccupantGains&, const OccupantGains&) = default;
};

struct ZoneModelParams {
  double capacitance_j_per_k = 2.0e6;
  double ua_w_per_k = 250.0;
  double moisture_capacitance_kg = 200.0;
  double infiltration_kg_s = 0.01;  // moisture exchange with outdoor air only
  double internal_gains_w = 1500.0;
  std::vector<double> internal_gains_schedule_w;  // per step; overrides the constant
  bool inherited_delay = true;
  std::size_t surface_count = 4;
  double surface_tau_s = 1800.0;
};

// The zone consumes one DischargeAir per step. With `inherited_delay` it
// uses the condition received on the previous step and buffers the current
// one; the very first step uses its own input.
class ZoneModel {
 public:
  ZoneModel() = default;
  ZoneModel(const ZoneModelParams& params, double temperature_c, double rh_pct);

  // C dT/dt = m cp (T_dis - T) + UA (T_out - T) + Q_int + Q_occ
  // C_w dw/dt = m (w_dis - w) + m_inf (w_out - w) + latent / h_fg
  // Both integrated exactly with inputs held over dt.
  const ZoneState& step(const DischargeAir& discharge, const OutdoorCondition& outdoor,
                        const OccupantGains& gains, double dt);

  const ZoneState& state() const { return state_; }
  const ZoneModelParams& params() const { return params_; }
  // The discharge condition the last step actually used.
  const DischargeAir& effective_discharge() const { return effective_; }
  std::int64_t step_count() const { return steps_; }
  double internal_gains_at(std::int64_t step) const;

 private:
  ZoneModelParams params_;
  ZoneState state_;
  std::optional<DischargeAir> buffer_;
  DischargeAir effective_;
  std::int64_t steps_ = 0;
};

struct ZoneLoad {
  double sensible_w = 0.0;
  double latent_w = 0.0;
};

// Load removed by the supply air: m cp (T_z - T_dis) and m (w_z - w_dis) h_fg.
ZoneLoad compute_zone_load(const ZoneState& state, const DischargeAir& discharge);

struct WeatherSeries {
  double step_size_s = 60.0;
  std::vector<OutdoorCondition> steps;

  const OutdoorCondition& at(std::int64_t step) const;
};

// Reads `time_s,tdb_c,rh_pct` and interpolates linearly onto the step grid
// for `horizon` steps. Throws ParseError naming the row or column.
WeatherSeries load_weather(const std::filesystem::path& path, double step_size_s,
                           std::int64_t horizon);
WeatherSeries parse_weather(const std::string& csv, double step_size_s, std::int64_t horizon);
WeatherSeries constant_weather(const OutdoorCondition& condition, double step_size_s,
                               std::int64_t horizon);

}  // namespace hilft
