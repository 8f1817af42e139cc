#include "hilft/building.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hilft/error.hpp"
#include "hilft/first_order.hpp"
#include "hilft/psychrometrics.hpp"

namespace hilft {

ZoneModel::ZoneModel(const ZoneModelParams& params, double temperature_c, double rh_pct)
    : params_(params) {
  if (!(params.capacitance_j_per_k > 0.0)) throw DomainError("zone capacitance must be > 0");
  if (!(params.ua_w_per_k >= 0.0)) throw DomainError("zone UA must be >= 0");
  if (!(params.moisture_capacitance_kg > 0.0)) {
    throw DomainError("zone moisture capacitance must be > 0");
  }
  state_.temperature_c = temperature_c;
  state_.humidity_ratio = psychro::humidity_ratio(temperature_c, rh_pct);
  state_.rh_pct = psychro::relative_humidity(temperature_c, state_.humidity_ratio);
  state_.surface_temps_c.assign(params.surface_count, temperature_c);
}

double ZoneModel::internal_gains_at(std::int64_t step) const {
  const auto& sched = params_.internal_gains_schedule_w;
  if (sched.empty()) return params_.internal_gains_w;
  return sched[static_cast<std::size_t>(step) % sched.size()];
}

const ZoneState& ZoneModel::step(const DischargeAir& discharge, const OutdoorCondition& outdoor,
                                 const OccupantGains& gains, double dt) {
  if (!(dt > 0.0)) throw DomainError("zone step requires dt > 0");
  for (double v : {discharge.temperature_c, discharge.rh_pct, discharge.mass_flow_kg_s,
                   outdoor.temperature_c, outdoor.rh_pct, gains.sensible_w, gains.latent_w}) {
    if (!std::isfinite(v)) throw DataIntegrityError("non-finite zone model input");
  }
  if (params_.inherited_delay) {
    effective_ = buffer_.value_or(discharge);
    buffer_ = discharge;
  } else {
    effective_ = discharge;
  }

  const double m = std::max(effective_.mass_flow_kg_s, 0.0);
  const double g = m * psychro::kCpAir;
  const double c = params_.capacitance_j_per_k;
  const double ua = params_.ua_w_per_k;
  const double q = internal_gains_at(steps_) + gains.sensible_w;
  state_.temperature_c = exact_linear_step(
      state_.temperature_c, (g * effective_.temperature_c + ua * outdoor.temperature_c + q) / c,
      (g + ua) / c, dt);

  const double cw = params_.moisture_capacitance_kg;
  const double inf = params_.infiltration_kg_s;
  const double w_out = psychro::humidity_ratio(outdoor.temperature_c, outdoor.rh_pct);
  const double moisture = gains.latent_w / psychro::kLatentHeat;
  const double w_next = exact_linear_step(
      state_.humidity_ratio,
      (m * effective_.humidity_ratio() + inf * w_out + moisture) / cw, (m + inf) / cw, dt);
  // Cap at saturation so that RH stays consistent with (T, w).
  state_.humidity_ratio =
      std::min(w_next, psychro::humidity_ratio(state_.temperature_c, 100.0));
  state_.rh_pct = psychro::relative_humidity(state_.temperature_c, state_.humidity_ratio);

  for (auto& s : state_.surface_temps_c) {
    s = exact_linear_step(s, state_.temperature_c / params_.surface_tau_s,
                          1.0 / params_.surface_tau_s, dt);
  }
  ++steps_;
  return state_;
}

ZoneLoad compute_zone_load(const ZoneState& state, const DischargeAir& discharge) {
  const double m = std::max(discharge.mass_flow_kg_s, 0.0);
  return ZoneLoad{
      m * psychro::kCpAir * (state.temperature_c - discharge.temperature_c),
      m * (state.humidity_ratio - discharge.humidity_ratio()) * psychro::kLatentHeat};
}

// ---------------------------------------------------------------------------

const OutdoorCondition& WeatherSeries::at(std::int64_t step) const {
  if (step < 0 || static_cast<std::size_t>(step) >= steps.size()) {
    throw NotAvailableError("weather step " + std::to_string(step) + " outside series");
  }
  return steps[static_cast<std::size_t>(step)];
}

namespace {

double field_to_double(std::string_view f, std::size_t row, const char* column) {
  while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
  while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) {
    f.remove_suffix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty() || !std::isfinite(v)) {
    throw ParseError("weather row " + std::to_string(row) + ", column " + column +
                     ": invalid value '" + std::string(f) + "'", row);
  }
  return v;
}

}  // namespace

WeatherSeries parse_weather(const std::string& csv, double step_size_s, std::int64_t horizon) {
  if (!(step_size_s > 0.0) || horizon < 1) throw DomainError("invalid weather grid");
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line)) throw ParseError("weather file is empty", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_s,tdb_c,rh_pct") {
    for (const char* col : {"time_s", "tdb_c", "rh_pct"}) {
      if (line.find(col) == std::string::npos) {
        throw ParseError(std::string("weather header missing column ") + col, 1);
      }
    }
    throw ParseError("weather header must be exactly time_s,tdb_c,rh_pct", 1);
  }
  std::vector<double> t, tdb, rh;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string_view> f;
    std::string_view view(line);
    std::size_t start = 0;
    for (std::size_t pos; (pos = view.find(',', start)) != std::string_view::npos; start = pos + 1) {
      f.push_back(view.substr(start, pos - start));
    }
    f.push_back(view.substr(start));
    if (f.size() != 3) {
      throw ParseError("weather row " + std::to_string(row) + ": expected 3 columns", row);
    }
    const double ti = field_to_double(f[0], row, "time_s");
    if (!t.empty() && !(ti > t.back())) {
      throw ParseError("weather row " + std::to_string(row) + ", column time_s: not increasing",
                       row);
    }
    t.push_back(ti);
    tdb.push_back(field_to_double(f[1], row, "tdb_c"));
    rh.push_back(field_to_double(f[2], row, "rh_pct"));
  }
  if (t.empty()) throw ParseError("weather file has no data rows", 2);
  const double needed = static_cast<double>(horizon - 1) * step_size_s;
  if (t.front() > 0.0 || t.back() < needed) {
    throw ParseError("weather covers [" + std::to_string(t.front()) + ", " +
                     std::to_string(t.back()) + "] s but the run needs [0, " +
                     std::to_string(needed) + "] s (insufficient horizon)", row);
  }

  WeatherSeries series;
  series.step_size_s = step_size_s;
  series.steps.reserve(static_cast<std::size_t>(horizon));
  std::size_t j = 0;
  for (std::int64_t k = 0; k < horizon; ++k) {
    const double tk = static_cast<double>(k) * step_size_s;
    while (j + 1 < t.size() && t[j + 1] <= tk) ++j;
    if (t[j] == tk || j + 1 == t.size()) {
      series.steps.push_back({tdb[j], rh[j]});
    } else {
      const double f = (tk - t[j]) / (t[j + 1] - t[j]);
      series.steps.push_back({tdb[j] + f * (tdb[j + 1] - tdb[j]), rh[j] + f * (rh[j + 1] - rh[j])});
    }
  }
  return series;
}

WeatherSeries load_weather(const std::filesystem::path& path, double step_size_s,
                           std::int64_t horizon) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open weather file " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_weather(buf.str(), step_size_s, horizon);
}

WeatherSeries constant_weather(const OutdoorCondition& condition, double step_size_s,
                               std::int64_t horizon) {
  WeatherSeries s;
  s.step_size_s = step_size_s;
  s.steps.assign(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)), condition);
  return s;
}

}  // namespace hilft
