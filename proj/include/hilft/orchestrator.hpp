#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hilft/building.hpp"
#include "hilft/datastore.hpp"
#include "hilft/geb.hpp"
#include "hilft/occupants.hpp"
#include "hilft/plant.hpp"
#include "hilft/scenario.hpp"

// Lock-step co-simulation master. Each step runs, in order:
//   measure -> transmit_up -> simulate -> transmit_down -> actuate -> seal
// Results simulated at step N reach the plant during step N's interval, so
// the setpoints measured at step N+1 are exactly the outputs of step N.
namespace hilft {

enum class StepPhase { measure, transmit_up, simulate, transmit_down, actuate, seal };

struct RunCounters {
  std::int64_t overruns = 0;
  std::vector<std::int64_t> overrun_steps;
  std::int64_t late_deliveries = 0;  // stale-hold results applied after their step
  std::int64_t outdoor_limitations = 0;
  std::int64_t emulator_saturations = 0;
  std::int64_t hvac_stale = 0;
  std::int64_t geb_clamps = 0;
  std::int64_t surrogate_clamps = 0;
  std::int64_t occupant_actions = 0;
  std::int64_t slow_applied = 0;
  std::int64_t slow_discarded = 0;

  friend bool operator==(const RunCounters&, const RunCounters&) = default;
};

// Everything that evolves during a run. Copying it is a snapshot:
// stepping a copy reproduces the original's next state.
struct SimulationState {
  std::int64_t step = 0;
  Plant plant;
  ZoneModel zone;
  std::vector<OccupantAgent> agents;  // sorted by id
  std::optional<SupervisorySetpoints> last_setpoints;
  SlowControllerHarness slow;
  std::optional<SlowResult> slow_current;
  RunCounters counters;
  std::vector<StepPhase> phase_trace;  // phases of the most recent step
};

// Wall stamps of one exchange, in ms.
struct StepTiming {
  double send_ms = 0.0;
  double sw_store_ms = 0.0;
  double sim_done_ms = 0.0;
  double hw_recv_ms = 0.0;
  double arrival_s = 0.0;  // modeled time from measurement to delivery
  bool overrun = false;
};

struct PacingReport {
  bool enabled = false;
  std::int64_t steps = 0;
  double min_slack_ms = 0.0;
  double mean_slack_ms = 0.0;
  double max_start_error_ms = 0.0;
  std::int64_t starts_outside_tolerance = 0;  // beyond +-50 ms
  double wall_duration_s = 0.0;
};

struct RunResult {
  RunLog log;
  std::optional<RunLog> hardware_log;
  RunCounters counters;
  PacingReport pacing;
};

nlohmann::json run_summary(const Scenario& scenario, const RunResult& result);

class Orchestrator {
 public:
  explicit Orchestrator(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  const WeatherSeries& weather() const { return *weather_; }

  SimulationState initial_state() const;

  // Executes the six phases of `state.step`. `hw` receives the hardware
  // side of the exchange when given. Throws OverrunAbort under the abort
  // policy.
  SimulationState step_once(SimulationState state, Datastore& sw, Datastore* hw = nullptr,
                            StepTiming* timing = nullptr) const;

  // Full run; paces against the wall clock in realtime mode.
  RunResult run() const;

  // Replaces the default slow-controller policy (the rule-based output).
  void set_slow_policy(SlowPolicy policy) { slow_policy_ = std::move(policy); }

 private:
  bool realtime() const { return scenario_.run.mode == RunMode::realtime; }
  double now_ms() const;

  Scenario scenario_;
  std::shared_ptr<const WeatherSeries> weather_;
  SlowPolicy slow_policy_;
  mutable std::chrono::steady_clock::time_point epoch_;
};

struct OutputFiles {
  std::filesystem::path run_csv;
  std::filesystem::path summary_json;
  std::filesystem::path scenario_json;
  std::optional<std::filesystem::path> hardware_csv;
};

// Writes run.csv, summary.json, scenario.json (effective configuration)
// and, when logged, hardware.csv into `out_dir`.
OutputFiles write_run_outputs(const Scenario& scenario, const RunResult& result,
                              const std::filesystem::path& out_dir);

}  // namespace hilft
