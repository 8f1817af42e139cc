#pragma once

// Moist-air relations at standard atmospheric pressure. Saturation pressure
// uses the Hyland-Wexler correlation (over ice below 0 degC).
namespace hilft::psychro {

inline constexpr double kAtmosphericPa = 101325.0;
inline constexpr double kCpAir = 1006.0;          // J/(kg K)
inline constexpr double kLatentHeat = 2.501e6;    // J/kg, vaporization at 0 degC
inline constexpr double kMolarRatio = 0.621945;

double saturation_pressure(double t_c);
double humidity_ratio(double t_c, double rh_pct, double p_pa = kAtmosphericPa);
// Clamped to [0, 100].
double relative_humidity(double t_c, double w, double p_pa = kAtmosphericPa);

}  // namespace hilft::psychro
