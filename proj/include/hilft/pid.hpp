#pragma once

namespace hilft {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;  // per second
  double kd = 0.0;  // seconds
};

enum class PidAction {
  direct,   // error = setpoint - pv
  reverse,  // error = pv - setpoint (cooling loops)
};

// Positional PID, derivative on measurement, clamping anti-windup.
//
// The integral term is frozen while the previous output sat at a limit in
// the direction the error pushes; otherwise it integrates and is then
// trimmed so the unclamped output does not overshoot that limit. Its
// magnitude never exceeds the output span.
class PidController {
 public:
  PidController() = default;
  PidController(PidGains gains, double out_min, double out_max,
                PidAction action = PidAction::direct);

  // Returns the clamped command. Non-finite inputs set the fault flag and
  // return the previous command unchanged.
  double step(double setpoint, double pv, double dt);

  // Sets the integral so that a zero-error step yields `output`.
  void preset_output(double output);
  void reset();

  const PidGains& gains() const { return gains_; }
  double integral() const { return integral_; }
  double output() const { return output_; }
  double out_min() const { return out_min_; }
  double out_max() const { return out_max_; }
  bool faulted() const { return faulted_; }
  // True when the last command was clipped by a limit.
  bool saturated() const { return saturated_; }

 private:
  PidGains gains_;
  double out_min_ = 0.0;
  double out_max_ = 1.0;
  PidAction action_ = PidAction::direct;
  double integral_ = 0.0;
  double output_ = 0.0;
  double last_pv_ = 0.0;
  bool has_last_pv_ = false;
  bool faulted_ = false;
  bool saturated_ = false;
};

}  // namespace hilft
