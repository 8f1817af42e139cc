#include "hilft/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hilft/error.hpp"

namespace hilft {

double rmse_shift(const SeriesRef& a, const SeriesRef& b, std::int64_t shift) {
  if (a.size() != b.size()) {
    throw InsufficientDataError("rmse_shift needs equal-length series (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
  }
  const Eigen::Index n = a.size();
  const Eigen::Index s = static_cast<Eigen::Index>(shift);
  const Eigen::Index overlap = n - std::abs(s);
  if (overlap < 2) {
    throw InsufficientDataError("rmse_shift overlap is " + std::to_string(std::max<Eigen::Index>(overlap, 0)) +
                                " points, need at least 2");
  }
  // a_t pairs with b_{t-s}: t runs over [max(0, s), n + min(0, s)).
  const auto diff = a.segment(std::max<Eigen::Index>(0, s), overlap) -
                    b.segment(std::max<Eigen::Index>(0, -s), overlap);
  return std::sqrt(diff.squaredNorm() / static_cast<double>(overlap));
}

std::int64_t best_shift(const SeriesRef& a, const SeriesRef& b, std::int64_t max_shift) {
  std::int64_t best = 0;
  double best_value = rmse_shift(a, b, 0);
  for (std::int64_t k = 1; k <= max_shift; ++k) {
    for (std::int64_t s : {-k, k}) {
      const double v = rmse_shift(a, b, s);
      if (v < best_value) {
        best_value = v;
        best = s;
      }
    }
  }
  return best;
}

double response_time(const SeriesRef& y, double dt_s, std::int64_t event_step,
                     std::int64_t final_window, const ResponseOptions& o) {
  const std::int64_t n = y.size();
  if (!(dt_s > 0.0)) throw DomainError("response_time needs dt > 0");
  if (event_step < 1 || event_step >= n) {
    throw InsufficientDataError("event step " + std::to_string(event_step) +
                                " leaves no lead or no response samples");
  }
  if (final_window < 1 || final_window > n - event_step) {
    throw InsufficientDataError("final window of " + std::to_string(final_window) +
                                " samples does not fit after the event");
  }
  const std::int64_t lead = std::min(o.lead_samples, event_step);
  const auto lead_seg = y.segment(event_step - lead, lead);
  const double y0 = lead_seg.mean();
  const double y_final = y.tail(final_window).mean();
  const double change = y_final - y0;
  if (change == 0.0) throw NoResponseError("series shows no change after the event");

  const double lead_std =
      std::sqrt((lead_seg.array() - y0).square().sum() / static_cast<double>(lead));
  if (!(lead_std < o.steady_fraction * std::abs(change))) {
    throw ProtocolViolationError("pre-event window is not steady (std " +
                                 std::to_string(lead_std) + ")");
  }

  // Normalized progress so rising and falling steps share one test.
  const auto progress = [&](std::int64_t k) { return (y[k] - y0) / change; };
  if (progress(event_step) >= o.level) return 0.0;
  for (std::int64_t k = event_step + 1; k < n; ++k) {
    const double p1 = progress(k);
    if (p1 >= o.level) {
      const double p0 = progress(k - 1);
      const double frac = (o.level - p0) / (p1 - p0);
      return (static_cast<double>(k - 1 - event_step) + frac) * dt_s;
    }
  }
  throw NoResponseError("series never reaches the response level");
}

HuntingVerdict hunting_metric(const SeriesRef& pv, const SeriesRef& sp, double dt_s,
                              const HuntingOptions& o) {
  if (pv.size() != sp.size()) throw InsufficientDataError("pv and sp lengths differ");
  if (!(dt_s > 0.0)) throw DomainError("hunting_metric needs dt > 0");
  const auto first = static_cast<Eigen::Index>(std::ceil(o.settle_s / dt_s - 1e-9));
  const auto last = std::min<Eigen::Index>(
      pv.size() - 1, static_cast<Eigen::Index>(std::floor((o.settle_s + o.window_s) / dt_s + 1e-9)));
  const Eigen::Index count = last - first + 1;
  if (count < 4) {
    throw InsufficientDataError("hunting window holds " +
                                std::to_string(std::max<Eigen::Index>(count, 0)) +
                                " samples, need at least 4");
  }
  const Series e = pv.segment(first, count) - sp.segment(first, count);

  HuntingVerdict v;
  v.samples = count;
  v.peak_to_peak = e.maxCoeff() - e.minCoeff();

  std::vector<double> times;
  int sign = 0;
  Eigen::Index last_nonzero = -1;
  for (Eigen::Index k = 0; k < count; ++k) {
    const int s = (e[k] > 0.0) - (e[k] < 0.0);
    if (s == 0) continue;
    if (sign != 0 && s != sign) {
      const double frac = e[last_nonzero] / (e[last_nonzero] - e[k]);
      times.push_back((static_cast<double>(last_nonzero) +
                       frac * static_cast<double>(k - last_nonzero)) * dt_s);
    }
    sign = s;
    last_nonzero = k;
  }
  v.crossings = static_cast<std::int64_t>(times.size());
  if (times.size() >= 2) {
    v.period_s = 2.0 * (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  }
  v.is_hunting = v.peak_to_peak > o.eps_amp && v.crossings >= o.n_min;
  return v;
}

namespace {

struct StepStamps {
  std::optional<double> send_ms;
  std::optional<double> recv_ms;
};

StepStamps stamps_of(const Frame& f) {
  StepStamps s;
  for (const auto& [key, sample] : f.entries) {
    if (!sample.wall_time_ms) continue;
    const double w = *sample.wall_time_ms;
    if (key.source == Source::emulated) {
      s.send_ms = s.send_ms ? std::min(*s.send_ms, w) : w;
    } else if (key.source == Source::setpoint) {
      s.recv_ms = s.recv_ms ? std::max(*s.recv_ms, w) : w;
    }
  }
  return s;
}

}  // namespace

double comm_delay_bound(const RunLog& hw, const RunLog& sw) {
  double bound = -std::numeric_limits<double>::infinity();
  std::size_t matched = 0;
  for (const auto& f : hw.frames) {
    const auto idx = static_cast<std::size_t>(f.step_index);
    if (idx >= sw.frames.size() || sw.frames[idx].entries.empty()) continue;
    const auto s = stamps_of(f);
    if (!s.send_ms || !s.recv_ms) continue;
    bound = std::max(bound, (*s.recv_ms - *s.send_ms) / 1000.0);
    ++matched;
  }
  if (matched == 0) {
    throw InsufficientDataError("no step carries send and receive stamps in both logs");
  }
  return bound;
}

std::string_view to_string(CapacityVerdict v) {
  switch (v) {
    case CapacityVerdict::ok: return "ok";
    case CapacityVerdict::undersized: return "undersized";
    case CapacityVerdict::oversized: return "oversized";
  }
  return "ok";
}

CapacityResult capacity_check(double peak, double rated, double r_lo, double r_hi) {
  if (!(peak > 0.0) || !(rated > 0.0)) {
    throw DomainError("capacity_check needs positive peak load and rated capacity");
  }
  CapacityResult r;
  r.ratio = peak / rated;
  if (r.ratio > r_hi) {
    r.verdict = CapacityVerdict::undersized;
  } else if (r.ratio < r_lo) {
    r.verdict = CapacityVerdict::oversized;
  }
  return r;
}

Series extract_series(const RunLog& log, const VariableKey& key) {
  Series out(static_cast<Eigen::Index>(log.frames.size()));
  bool seen = false;
  std::optional<std::int64_t> gap;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const Sample* s = log.frames[i].find(key);
    if (s) {
      out[static_cast<Eigen::Index>(i)] = s->value;
      seen = true;
    } else if (!gap) {
      gap = log.frames[i].step_index;
    }
  }
  if (!seen) throw UnknownKeyError("variable " + format_key(key) + " not in run");
  if (gap) {
    throw InsufficientDataError("variable " + format_key(key) + " missing at step " +
                                std::to_string(*gap));
  }
  return out;
}

}  // namespace hilft
