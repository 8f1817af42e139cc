#pragma once

#include <optional>
#include <vector>

// Values that cross the hardware/software boundary each step.
namespace hilft {

// DisAirCond: air delivered by the HVAC unit into the zone.
struct DischargeAir {
  double temperature_c = 13.0;
  double rh_pct = 50.0;
  double mass_flow_kg_s = 0.0;

  double humidity_ratio() const;
  friend bool operator==(const DischargeAir&, const DischargeAir&) = default;
};

// ZnCond as produced by the virtual building.
struct ZoneState {
  double temperature_c = 24.0;
  double rh_pct = 50.0;
  double humidity_ratio = 0.0;
  std::vector<double> surface_temps_c;

  friend bool operator==(const ZoneState&, const ZoneState&) = default;
};

// OutCond. `rh_pct` is unused by water-side emulators.
struct OutdoorCondition {
  double temperature_c = 20.0;
  double rh_pct = 50.0;

  friend bool operator==(const OutdoorCondition&, const OutdoorCondition&) = default;
};

// CtrlSig: supervisory overrides sent to the HVAC unit.
struct SupervisorySetpoints {
  double cooling_c = 24.0;
  double heating_c = 20.0;
  double discharge_c = 13.0;
  std::optional<double> static_pressure_pa;

  friend bool operator==(const SupervisorySetpoints&, const SupervisorySetpoints&) = default;
};

}  // namespace hilft
