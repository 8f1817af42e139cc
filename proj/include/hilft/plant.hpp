#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "hilft/exchange.hpp"
#include "hilft/pid.hpp"

// The simulated hardware side: HVAC unit, duct-built zone emulator and
// outdoor emulator, all stepped on a fixed control tick.
namespace hilft {

// Which temperature the HVAC zone loop regulates.
enum class PvMode {
  method1_emulated_pv,   // emulated zone air (couples HVAC and emulator)
  method2_simulated_pv,  // simulated zone air from the virtual building
};

// ---------------------------------------------------------------------------
// Zone emulator

struct ZoneEmulatorParams {
  double capacitance_j_per_k = 2000.0;  // air node plus thermal-mass coil
  double moisture_mass_kg = 5.0;        // air mass participating in the moisture balance
  double heater_w = 8000.0;
  double cooling_w = 3000.0;
  double humidifier_kg_s = 0.002;
  PidGains temperature_gains{2000.0, 40.0, 0.0};       // W/K, W/(K s)
  PidGains humidity_gains{2.0, 2.0 / 300.0, 0.0};       // (kg/s) per (kg/kg)
  bool ideal = false;  // state snaps to the target every tick
};

struct ZoneEmuState {
  double temperature_c = 24.0;
  double humidity_ratio = 0.009;
  double heater_w = 0.0;
  double cooling_w = 0.0;
  double humidifier_kg_s = 0.0;
  bool saturated = false;  // a coil command was clipped on the last step
};

class ZoneEmulator {
 public:
  ZoneEmulator() = default;
  ZoneEmulator(const ZoneEmulatorParams& params, double temperature_c, double rh_pct);

  // One control tick: coil loops track `target`, then the air node and the
  // moisture balance are advanced exactly with inputs held over dt:
  //   C dT/dt = Q_heat - Q_cool + m cp (T_dis - T)
  //   M dw/dt = m_hum + m (w_dis - w)
  const ZoneEmuState& step(const ZoneState& target, const DischargeAir& inlet, double dt);

  // Initializes the coil integral to a steady heater/cooler output in W
  // (positive heats).
  void preset_heat(double watts);

  const ZoneEmuState& state() const { return state_; }
  const ZoneEmulatorParams& params() const { return params_; }
  double rh_pct() const;
  // Net heat delivered to the air node since construction (J), integrated
  // along the exact trajectory.
  double heat_input_j() const { return heat_input_j_; }
  std::int64_t saturation_count() const { return saturation_count_; }

 private:
  ZoneEmulatorParams params_;
  ZoneEmuState state_;
  PidController temperature_loop_;
  PidController humidity_loop_;
  double heat_input_j_ = 0.0;
  std::int64_t saturation_count_ = 0;
};

// ---------------------------------------------------------------------------
// HVAC unit (single-duct VAV with reheat)

struct HvacParams {
  PidGains cooling_gains{0.5, 0.5 / 900.0, 0.0};  // fraction per K
  PidGains heating_gains{0.5, 0.5 / 900.0, 0.0};
  double min_flow_kg_s = 0.05;
  double max_flow_kg_s = 0.5;
  double reheat_delta_k = 10.0;
  double supply_humidity_ratio = 0.008;
  double actuator_tau_s = 60.0;
  double min_discharge_c = 10.0;
  double max_discharge_c = 40.0;
  double rated_capacity_w = 5000.0;
};

class HvacUnit {
 public:
  HvacUnit() = default;
  HvacUnit(const HvacParams& params, const DischargeAir& initial);

  // The cooling loop modulates airflow and the heating loop adds reheat
  // above the discharge setpoint; both act on the PV chosen by `mode`.
  // Commands reach the outlet through a first-order actuator lag.
  //
  // In method 2 a missing `zone_sim` holds the last discharge and sets the
  // stale flag.
  DischargeAir step(PvMode mode, const ZoneEmuState& zone_emu,
                    const std::optional<ZoneState>& zone_sim,
                    const SupervisorySetpoints& setpoints, double dt);

  const DischargeAir& discharge() const { return discharge_; }
  const HvacParams& params() const { return params_; }
  double cooling_output() const { return cooling_loop_.output(); }
  double heating_output() const { return heating_loop_.output(); }
  bool stale() const { return stale_; }
  std::int64_t stale_count() const { return stale_count_; }

 private:
  HvacParams params_;
  PidController cooling_loop_;
  PidController heating_loop_;
  DischargeAir discharge_;
  bool stale_ = false;
  std::int64_t stale_count_ = 0;
};

// ---------------------------------------------------------------------------
// Outdoor emulator

enum class OutdoorKind { air, water };

struct Envelope {
  double t_min_c = -12.0;
  double t_max_c = 65.0;
  double rh_min_pct = 10.0;
  double rh_max_pct = 100.0;
};

// Water: 10..55 degC. Air: -12..65 degC dry bulb, 10..100 % RH.
Envelope default_envelope(OutdoorKind kind);

struct OutdoorParams {
  OutdoorKind kind = OutdoorKind::air;
  double tau_s = 120.0;
  Envelope envelope = default_envelope(OutdoorKind::air);
};

class OutdoorEmulator {
 public:
  OutdoorEmulator() = default;
  OutdoorEmulator(const OutdoorParams& params, const OutdoorCondition& initial);

  // value <- target + (value - target) exp(-dt/tau), then clamped to the
  // envelope. A clamp is a limitation event, not an error.
  const OutdoorCondition& step(const OutdoorCondition& target, double dt);

  const OutdoorCondition& value() const { return value_; }
  const OutdoorParams& params() const { return params_; }
  bool limited() const { return limited_; }
  std::int64_t limitation_count() const { return limitation_count_; }

 private:
  OutdoorParams params_;
  OutdoorCondition value_;
  bool limited_ = false;
  std::int64_t limitation_count_ = 0;
};

// ---------------------------------------------------------------------------
// Plant: the three devices, a duct between HVAC outlet and emulator inlet,
// and the queue of setpoint deliveries from the software side.

struct PlantCommand {
  ZoneState zone_target;
  OutdoorCondition outdoor_target;
  SupervisorySetpoints setpoints;
};

struct PlantParams {
  double tick_s = 1.0;
  double duct_delay_s = 0.0;
  PvMode pv_mode = PvMode::method2_simulated_pv;
  HvacParams hvac;
  ZoneEmulatorParams emulator;
  OutdoorParams outdoor;
};

struct PlantInitialState {
  double zone_temperature_c = 24.0;
  double zone_rh_pct = 50.0;
  double emulator_heat_w = 0.0;
  DischargeAir discharge;
  OutdoorCondition outdoor;
};

struct PlantMeasurement {
  DischargeAir discharge;  // at the zone inlet
  ZoneEmuState zone;
  double zone_rh_pct = 0.0;
  OutdoorCondition outdoor;
  PlantCommand applied;  // latest command delivered by the measurement instant
  double cooling_output = 0.0;
  double heating_output = 0.0;
  double sensible_load_w = 0.0;  // m cp (T_emu - T_dis)
  double latent_load_w = 0.0;
  bool outdoor_limited = false;  // any clamp during the last interval
  bool emulator_saturated = false;
  bool hvac_stale = false;
};

class Plant {
 public:
  Plant() = default;
  Plant(const PlantParams& params, const PlantInitialState& initial,
        const PlantCommand& initial_command);

  PlantMeasurement measure() const;

  // Delivers `command` at absolute plant time `at_s`; it takes effect on
  // the first tick that starts at or after that instant.
  void schedule(double at_s, const PlantCommand& command);

  // Runs whole ticks covering `duration_s`.
  void advance(double duration_s);

  double time_s() const { return static_cast<double>(tick_) * params_.tick_s; }
  const PlantParams& params() const { return params_; }
  const HvacUnit& hvac() const { return hvac_; }
  const ZoneEmulator& emulator() const { return emulator_; }
  const OutdoorEmulator& outdoor() const { return outdoor_; }
  std::size_t pending_deliveries() const { return pending_.size(); }

 private:
  struct Delivery {
    std::int64_t tick;
    PlantCommand command;
  };

  void tick_once();

  PlantParams params_;
  HvacUnit hvac_;
  ZoneEmulator emulator_;
  OutdoorEmulator outdoor_;
  PlantCommand applied_;
  std::deque<Delivery> pending_;
  std::deque<DischargeAir> duct_;
  DischargeAir inlet_;
  std::int64_t tick_ = 0;
  bool interval_limited_ = false;
  bool interval_saturated_ = false;
  bool interval_stale_ = false;
};

}  // namespace hilft
