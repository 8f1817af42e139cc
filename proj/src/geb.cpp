#include "hilft/geb.hpp"

#include <algorithm>
#include <cmath>

#include "hilft/error.hpp"

namespace hilft {

std::string_view to_string(GebMode m) {
  switch (m) {
    case GebMode::efficiency: return "efficiency";
    case GebMode::shed: return "shed";
    case GebMode::shift: return "shift";
    case GebMode::modulate: return "modulate";
  }
  return "efficiency";
}

std::optional<GebMode> parse_geb_mode(std::string_view text) {
  for (auto m : {GebMode::efficiency, GebMode::shed, GebMode::shift, GebMode::modulate}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

bool enforce_bounds(SupervisorySetpoints& s, const RbcParams& p) {
  const SupervisorySetpoints before = s;
  s.cooling_c = std::clamp(s.cooling_c, p.min_setpoint_c + p.min_gap_c, p.max_setpoint_c);
  s.heating_c = std::max(std::min(s.heating_c, s.cooling_c - p.min_gap_c), p.min_setpoint_c);
  return !(before == s);
}

RbcOutput rbc_step(const RbcParams& p, const RbcClock& clock,
                   const SupervisorySetpoints& baseline, double modulation_signal,
                   const std::optional<SupervisorySetpoints>& previous) {
  RbcOutput out{baseline, false, false};
  const double t = clock.sim_time_s;
  const EventWindow* in_window = nullptr;
  const EventWindow* in_pre = nullptr;
  for (const auto& w : p.windows) {
    if (t >= w.start_s && t < w.end_s) in_window = &w;
    if (p.mode == GebMode::shift && t >= w.start_s - p.pre_window_s && t < w.start_s) {
      in_pre = &w;
    }
  }
  if (!in_window && !in_pre) return out;
  out.active = true;

  auto& s = out.setpoints;
  switch (p.mode) {
    case GebMode::efficiency: {
      const double widen = in_window->magnitude.value_or(p.delta_eff_c) / 2.0;
      s.cooling_c = baseline.cooling_c + widen;
      s.heating_c = baseline.heating_c - widen;
      break;
    }
    case GebMode::shed:
      s.cooling_c = baseline.cooling_c + in_window->magnitude.value_or(p.delta_shed_c);
      break;
    case GebMode::shift:
      if (in_window) {
        s.cooling_c = baseline.cooling_c + in_window->magnitude.value_or(p.delta_shed_c);
      } else {
        s.cooling_c = baseline.cooling_c - p.delta_pre_c;
      }
      break;
    case GebMode::modulate: {
      const double depth = in_window->magnitude.value_or(p.modulation_depth_c);
      const double signal = std::clamp(modulation_signal, -1.0, 1.0);
      double target = baseline.cooling_c + depth * signal;
      const double from = previous ? previous->cooling_c : baseline.cooling_c;
      const double r = p.rate_limit_c_per_step;
      if (r > 0.0) target = std::clamp(target, from - r, from + r);
      s.cooling_c = target;
      break;
    }
  }
  out.clamped = enforce_bounds(s, p);
  return out;
}

// ---------------------------------------------------------------------------

SlowControllerHarness::SlowControllerHarness(double compute_latency_s, double step_size_s,
                                             SlowPolicy policy)
    : latency_s_(compute_latency_s), step_size_s_(step_size_s), policy_(std::move(policy)) {
  if (!(compute_latency_s >= 0.0) || !(step_size_s > 0.0)) {
    throw DomainError("slow controller needs latency >= 0 and step > 0");
  }
}

void SlowControllerHarness::submit(const SlowInputs& inputs, std::int64_t step) {
  if (pending_) {
    throw BusyError("slow controller busy with the step " +
                    std::to_string(pending_->submit_step) + " computation");
  }
  const auto lag = static_cast<std::int64_t>(std::ceil(latency_s_ / step_size_s_ - 1e-12));
  pending_ = Pending{step, step + std::max<std::int64_t>(1, lag),
                     policy_ ? policy_(inputs) : inputs.rbc};
}

std::optional<SlowResult> SlowControllerHarness::poll(std::int64_t step) {
  if (!pending_ || step < pending_->ready_step) return std::nullopt;
  SlowResult r{pending_->submit_step, pending_->result};
  pending_.reset();
  return r;
}

std::int64_t SlowControllerHarness::ready_step() const {
  return pending_ ? pending_->ready_step : -1;
}

}  // namespace hilft
