#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "hilft/datastore.hpp"

// Integration-quality metrics over step-indexed series. Series are Eigen
// column vectors sampled on a uniform grid; every function here is pure.
namespace hilft {

using Series = Eigen::VectorXd;
using SeriesRef = Eigen::Ref<const Eigen::VectorXd>;

// sqrt(mean((a_t - b_{t-shift})^2)) over the overlap of length n - |shift|.
// When b lags a by d steps (b_t = a_{t-d}), rmse_shift(a, b, -d) == 0 and
// rmse_shift(b, a, d) == 0.
// Throws InsufficientDataError for lengths that differ or an overlap < 2.
double rmse_shift(const SeriesRef& a, const SeriesRef& b, std::int64_t shift);

// Shift in [-max_shift, max_shift] with the smallest rmse_shift (ties go
// to the smaller |shift|).
std::int64_t best_shift(const SeriesRef& a, const SeriesRef& b, std::int64_t max_shift);

struct ResponseOptions {
  std::int64_t lead_samples = 10;
  double steady_fraction = 0.01;  // lead std must stay below this share of the change
  double level = 0.632;
};

// Seconds from the event sample to the first crossing of
// y0 + level * (y_final - y0), interpolated linearly between samples.
// y0 is the lead-window mean; y_final the mean of the last `final_window`
// samples. Throws ProtocolViolationError when the lead window is not
// steady and NoResponseError when the level is never crossed.
double response_time(const SeriesRef& y, double dt_s, std::int64_t event_step,
                     std::int64_t final_window, const ResponseOptions& options = {});

struct HuntingOptions {
  double settle_s = 600.0;
  double window_s = 1800.0;
  double eps_amp = 0.5;
  std::int64_t n_min = 6;
};

struct HuntingVerdict {
  double peak_to_peak = 0.0;  // of pv - sp over the window
  std::int64_t crossings = 0;
  bool is_hunting = false;
  std::optional<double> period_s;  // twice the mean crossing spacing
  std::int64_t samples = 0;
};

// Evaluates pv - sp over [settle_s, settle_s + window_s]. Exact zeros do
// not count as a sign change. Throws InsufficientDataError below 4 samples.
HuntingVerdict hunting_metric(const SeriesRef& pv, const SeriesRef& sp, double dt_s,
                              const HuntingOptions& options = {});

// Largest (receive - send) wall interval over steps present in both logs,
// in seconds. In the hardware log emulated samples carry the send stamp
// and setpoint samples the receive stamp of the same exchange.
double comm_delay_bound(const RunLog& hardware_log, const RunLog& software_log);

enum class CapacityVerdict { ok, undersized, oversized };
std::string_view to_string(CapacityVerdict v);

struct CapacityResult {
  double ratio = 0.0;
  CapacityVerdict verdict = CapacityVerdict::ok;
};

// ratio = peak / rated; ok inside [r_lo, r_hi], undersized above r_hi.
CapacityResult capacity_check(double peak_load_w, double rated_capacity_w, double r_lo = 0.5,
                              double r_hi = 1.0);

// Values of `key` for every frame in the log. Throws UnknownKeyError if the
// key never appears and InsufficientDataError on a gap.
Series extract_series(const RunLog& log, const VariableKey& key);

}  // namespace hilft
