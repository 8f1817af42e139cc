#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hilft/building.hpp"
#include "hilft/geb.hpp"
#include "hilft/occupants.hpp"
#include "hilft/plant.hpp"

// Scenario document: one JSON tree with blocks run, delays, plant,
// building, occupants, geb and logging. Parsing is strict; every key has a
// default, and the effective tree echoes all of them.
namespace hilft {

enum class RunMode { fast, realtime };
enum class OverrunPolicy { skip_and_hold, abort };

struct RunBlock {
  std::string id = "scenario";
  double step_size_s = 60.0;
  std::int64_t horizon = 1440;
  RunMode mode = RunMode::fast;
  std::uint64_t seed = 1;
};

struct DelayBlock {
  double comm_latency_s = 0.0;  // round trip, split evenly between directions
  double jitter_s = 0.0;        // per direction, uniform in [0, jitter_s]
  bool inherited_delay = true;
  bool stale_hold = false;
  double simulate_delay_s = 0.0;                 // injected into the simulate phase
  std::vector<std::int64_t> simulate_delay_steps;  // empty means every step
  OverrunPolicy overrun_policy = OverrunPolicy::skip_and_hold;
};

struct PlantInitialBlock {
  std::optional<double> zone_temperature_c;  // defaults to the building's
  std::optional<double> discharge_flow_kg_s;  // defaults to the steady-state flow
  std::optional<double> emulator_heat_w;      // defaults to the steady coil output
};

struct PlantBlock {
  PlantParams params;
  PlantInitialBlock initial;
};

struct WeatherBlock {
  std::string file;  // empty: constant conditions below
  double constant_tdb_c = 32.0;
  double constant_rh_pct = 50.0;
};

struct BuildingBlock {
  ZoneModelParams zone;
  double initial_temperature_c = 24.0;
  double initial_rh_pct = 50.0;
  WeatherBlock weather;
};

struct OccupantBlock {
  std::vector<OccupantAgent> agents;
  NearOccupantSurrogate surrogate;
  ActionEffects effects;
  double thermostat_band_c = 2.0;
};

enum class SupervisorKind { rbc, slow };

struct GebBlock {
  RbcParams rbc;
  SupervisorySetpoints baseline;
  std::vector<double> modulation_signal;  // per step, repeats; empty means 0
  SupervisorKind controller = SupervisorKind::rbc;
  double compute_latency_s = 0.0;
  double freshness_s = 600.0;
};

struct LoggingBlock {
  bool hardware_log = false;
  std::vector<std::string> exclude;  // variable names kept out of the run log
};

struct Scenario {
  RunBlock run;
  DelayBlock delays;
  PlantBlock plant;
  BuildingBlock building;
  OccupantBlock occupants;
  GebBlock geb;
  LoggingBlock logging;
  std::filesystem::path base_dir;  // resolves relative weather paths
};

// Applies "a.b.c=value" overrides to the raw tree. The value is parsed as
// JSON when possible and kept as a string otherwise; numeric segments index
// arrays. Throws ValidationError on a malformed override.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Strict parse plus cross-field checks. Throws ValidationError carrying the
// dotted path of the offending key.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// Reads the file, applies overrides in order, then parses.
Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});

// Full tree with every default materialized.
nlohmann::json effective_config(const Scenario& s);

// Weather for the run horizon; throws ValidationError pointing at
// building.weather on a load failure.
WeatherSeries scenario_weather(const Scenario& s);

}  // namespace hilft
