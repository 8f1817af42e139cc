#include "hilft/psychrometrics.hpp"

#include <algorithm>
#include <cmath>

namespace hilft::psychro {

double saturation_pressure(double t_c) {
  const double t = t_c + 273.15;
  if (t_c >= 0.0) {
    constexpr double c8 = -5.8002206e3, c9 = 1.3914993, c10 = -4.8640239e-2,
                     c11 = 4.1764768e-5, c12 = -1.4452093e-8, c13 = 6.5459673;
    return std::exp(c8 / t + c9 + c10 * t + c11 * t * t + c12 * t * t * t + c13 * std::log(t));
  }
  constexpr double c1 = -5.6745359e3, c2 = 6.3925247, c3 = -9.677843e-3, c4 = 6.2215701e-7,
                   c5 = 2.0747825e-9, c6 = -9.484024e-13, c7 = 4.1635019;
  return std::exp(c1 / t + c2 + c3 * t + c4 * t * t + c5 * t * t * t + c6 * t * t * t * t +
                  c7 * std::log(t));
}

double humidity_ratio(double t_c, double rh_pct, double p_pa) {
  const double pw = std::clamp(rh_pct, 0.0, 100.0) / 100.0 * saturation_pressure(t_c);
  return kMolarRatio * pw / (p_pa - pw);
}

double relative_humidity(double t_c, double w, double p_pa) {
  const double pw = std::max(w, 0.0) * p_pa / (kMolarRatio + std::max(w, 0.0));
  return std::clamp(100.0 * pw / saturation_pressure(t_c), 0.0, 100.0);
}

}  // namespace hilft::psychro
