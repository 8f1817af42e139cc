#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hilft/exchange.hpp"

// Supervisory control for grid services: rule-based setpoint overrides per
// scenario, and a harness that gives a slow optimizer its timing contract.
namespace hilft {

enum class GebMode { efficiency, shed, shift, modulate };

std::string_view to_string(GebMode m);
std::optional<GebMode> parse_geb_mode(std::string_view text);

struct EventWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<double> magnitude;  // overrides the mode's default offset or depth
};

struct RbcParams {
  GebMode mode = GebMode::efficiency;
  std::vector<EventWindow> windows;
  double delta_eff_c = 1.0;
  double delta_shed_c = 2.0;
  double delta_pre_c = 1.5;
  double pre_window_s = 7200.0;
  double modulation_depth_c = 1.0;
  double rate_limit_c_per_step = 0.5;
  double min_setpoint_c = 15.0;
  double max_setpoint_c = 30.0;
  double min_gap_c = 1.0;
};

struct RbcClock {
  std::int64_t step = 0;
  double sim_time_s = 0.0;
};

struct RbcOutput {
  SupervisorySetpoints setpoints;
  bool clamped = false;
  bool active = false;  // inside a window (or a shift pre-window)
};

// Pure function of its inputs. `previous` is the last emitted setpoint set
// and only matters for the modulation rate limit.
//
//   efficiency: deadband widened by delta_eff about its midpoint
//   shed:       cooling = baseline + delta_shed inside the window
//   shift:      cooling = baseline - delta_pre in the pre-window, then
//               baseline + delta_shed inside the window
//   modulate:   cooling = baseline + depth * signal, moving at most
//               rate_limit per step
//
// Outside every window (and pre-window) the baseline passes through
// unchanged.
RbcOutput rbc_step(const RbcParams& params, const RbcClock& clock,
                   const SupervisorySetpoints& baseline, double modulation_signal,
                   const std::optional<SupervisorySetpoints>& previous = std::nullopt);

// Clamps into [min, max] and restores heating <= cooling - min_gap.
// Returns true if anything changed.
bool enforce_bounds(SupervisorySetpoints& s, const RbcParams& params);

struct SlowInputs {
  std::int64_t step = 0;
  double sim_time_s = 0.0;
  double zone_temperature_c = 0.0;
  SupervisorySetpoints baseline;
  SupervisorySetpoints rbc;  // what the rule-based path would emit this step
};

struct SlowResult {
  std::int64_t submit_step = 0;
  SupervisorySetpoints setpoints;
};

using SlowPolicy = std::function<SupervisorySetpoints(const SlowInputs&)>;

// Models a controller whose solve takes `compute_latency_s` of wall time.
// A result submitted at step N becomes visible at the barrier of step
// N + max(1, ceil(latency / step)); never in the step that produced it.
class SlowControllerHarness {
 public:
  SlowControllerHarness() = default;
  SlowControllerHarness(double compute_latency_s, double step_size_s, SlowPolicy policy = {});

  // Throws BusyError when a computation is still pending.
  void submit(const SlowInputs& inputs, std::int64_t step);
  // Returns a completed result once; never blocks.
  std::optional<SlowResult> poll(std::int64_t step);

  bool pending() const { return pending_.has_value(); }
  std::int64_t ready_step() const;
  double compute_latency_s() const { return latency_s_; }

 private:
  struct Pending {
    std::int64_t submit_step;
    std::int64_t ready_step;
    SupervisorySetpoints result;
  };
  double latency_s_ = 0.0;
  double step_size_s_ = 60.0;
  SlowPolicy policy_;
  std::optional<Pending> pending_;
};

}  // namespace hilft
