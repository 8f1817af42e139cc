#include "hilft/pid.hpp"

#include <algorithm>
#include <cmath>

#include "hilft/error.hpp"

namespace hilft {

PidController::PidController(PidGains gains, double out_min, double out_max, PidAction action)
    : gains_(gains), out_min_(out_min), out_max_(out_max), action_(action) {
  if (!(out_min < out_max)) throw DomainError("PID output limits must satisfy min < max");
}

double PidController::step(double setpoint, double pv, double dt) {
  if (!(dt > 0.0)) throw DomainError("PID step requires dt > 0");
  if (!std::isfinite(setpoint) || !std::isfinite(pv) || !std::isfinite(dt)) {
    faulted_ = true;
    return output_;
  }
  faulted_ = false;
  const double sign = action_ == PidAction::direct ? 1.0 : -1.0;
  const double error = sign * (setpoint - pv);
  const double p = gains_.kp * error;
  const double d = has_last_pv_ ? -sign * gains_.kd * (pv - last_pv_) / dt : 0.0;
  last_pv_ = pv;
  has_last_pv_ = true;

  const bool held_high = output_ >= out_max_ && error > 0.0;
  const bool held_low = output_ <= out_min_ && error < 0.0;
  if (!held_high && !held_low) {
    double next = integral_ + gains_.ki * error * dt;
    if (error > 0.0 && p + next + d > out_max_) next = std::max(integral_, out_max_ - p - d);
    if (error < 0.0 && p + next + d < out_min_) next = std::min(integral_, out_min_ - p - d);
    const double span = out_max_ - out_min_;
    integral_ = std::clamp(next, -span, span);
  }

  const double raw = p + integral_ + d;
  output_ = std::clamp(raw, out_min_, out_max_);
  saturated_ = raw != output_;
  return output_;
}

void PidController::preset_output(double output) {
  const double span = out_max_ - out_min_;
  integral_ = std::clamp(output, -span, span);
  output_ = std::clamp(output, out_min_, out_max_);
}

void PidController::reset() {
  integral_ = 0.0;
  output_ = 0.0;
  last_pv_ = 0.0;
  has_last_pv_ = false;
  faulted_ = false;
  saturated_ = false;
}

}  // namespace hilft
