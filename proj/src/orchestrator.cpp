#include "hilft/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "hilft/error.hpp"
#include "hilft/psychrometrics.hpp"
#include "hilft/rng.hpp"

namespace hilft {

namespace {

constexpr double kPacingToleranceMs = 50.0;

// Writes one step's samples, honoring the exclude list.
class Publisher {
 public:
  Publisher(Datastore& store, std::int64_t step, const std::vector<std::string>& exclude)
      : store_(store), step_(step), exclude_(exclude) {}

  void put(const char* name, Source source, const char* unit, double value, double wall_ms) {
    if (std::find(exclude_.begin(), exclude_.end(), name) != exclude_.end()) return;
    store_.upsert(VariableKey{name, source, unit}, step_, value, wall_ms);
  }

 private:
  Datastore& store_;
  std::int64_t step_;
  const std::vector<std::string>& exclude_;
};

double flag(bool b) { return b ? 1.0 : 0.0; }

void publish_measurement(Publisher& p, const PlantMeasurement& m, double wall) {
  const auto E = Source::emulated;
  p.put("dis.T", E, "degC", m.discharge.temperature_c, wall);
  p.put("dis.RH", E, "%", m.discharge.rh_pct, wall);
  p.put("dis.m_dot", E, "kg/s", m.discharge.mass_flow_kg_s, wall);
  p.put("zone.T", E, "degC", m.zone.temperature_c, wall);
  p.put("zone.RH", E, "%", m.zone_rh_pct, wall);
  p.put("out.T", E, "degC", m.outdoor.temperature_c, wall);
  p.put("out.RH", E, "%", m.outdoor.rh_pct, wall);
  p.put("zone.load.sensible", E, "W", m.sensible_load_w, wall);
  p.put("zone.load.latent", E, "W", m.latent_load_w, wall);
  p.put("plant.hvac.cooling_output", E, "1", m.cooling_output, wall);
  p.put("plant.hvac.heating_output", E, "1", m.heating_output, wall);
  p.put("plant.hvac.stale", E, "1", flag(m.hvac_stale), wall);
  p.put("plant.emu.heater", E, "W", m.zone.heater_w, wall);
  p.put("plant.emu.cooling", E, "W", m.zone.cooling_w, wall);
  p.put("plant.emu.humidifier", E, "kg/s", m.zone.humidifier_kg_s, wall);
  p.put("plant.emu.w", E, "kg/kg", m.zone.humidity_ratio, wall);
  p.put("plant.emu.saturated", E, "1", flag(m.emulator_saturated), wall);
  p.put("plant.outdoor.limited", E, "1", flag(m.outdoor_limited), wall);
}

void publish_command(Publisher& p, const PlantCommand& c, Source source, double wall) {
  p.put("zone.T", source, "degC", c.zone_target.temperature_c, wall);
  p.put("zone.RH", source, "%", c.zone_target.rh_pct, wall);
  p.put("out.T", source, "degC", c.outdoor_target.temperature_c, wall);
  p.put("out.RH", source, "%", c.outdoor_target.rh_pct, wall);
  p.put("spt.cooling", source, "degC", c.setpoints.cooling_c, wall);
  p.put("spt.heating", source, "degC", c.setpoints.heating_c, wall);
  p.put("spt.discharge", source, "degC", c.setpoints.discharge_c, wall);
}

bool injected_at(const DelayBlock& d, std::int64_t step) {
  if (d.simulate_delay_s <= 0.0) return false;
  if (d.simulate_delay_steps.empty()) return true;
  return std::find(d.simulate_delay_steps.begin(), d.simulate_delay_steps.end(), step) !=
         d.simulate_delay_steps.end();
}

}  // namespace

Orchestrator::Orchestrator(Scenario scenario)
    : scenario_(std::move(scenario)),
      weather_(std::make_shared<const WeatherSeries>(scenario_weather(scenario_))),
      epoch_(std::chrono::steady_clock::now()) {}

double Orchestrator::now_ms() const {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - epoch_)
      .count();
}

SimulationState Orchestrator::initial_state() const {
  const auto& s = scenario_;
  const auto& init = s.plant.initial;
  const double t_dis = s.geb.baseline.discharge_c;

  PlantInitialState pi;
  pi.zone_temperature_c = init.zone_temperature_c.value_or(s.building.initial_temperature_c);
  pi.zone_rh_pct = s.building.initial_rh_pct;
  pi.emulator_heat_w = init.emulator_heat_w.value_or(0.0);
  pi.discharge.temperature_c = t_dis;
  pi.discharge.mass_flow_kg_s = init.discharge_flow_kg_s.value_or(s.plant.params.hvac.min_flow_kg_s);
  pi.discharge.rh_pct = psychro::relative_humidity(
      t_dis, std::min(s.plant.params.hvac.supply_humidity_ratio,
                      psychro::humidity_ratio(t_dis, 100.0)));
  pi.outdoor = weather_->at(0);

  SimulationState st;
  st.zone = ZoneModel(s.building.zone, s.building.initial_temperature_c, s.building.initial_rh_pct);
  PlantCommand first{st.zone.state(), weather_->at(0), s.geb.baseline};
  st.plant = Plant(s.plant.params, pi, first);
  st.agents = s.occupants.agents;
  std::sort(st.agents.begin(), st.agents.end(),
            [](const OccupantAgent& a, const OccupantAgent& b) { return a.id < b.id; });
  if (s.geb.controller == SupervisorKind::slow) {
    st.slow = SlowControllerHarness(s.geb.compute_latency_s, s.run.step_size_s, slow_policy_);
  }
  return st;
}

SimulationState Orchestrator::step_once(SimulationState st, Datastore& sw, Datastore* hw,
                                        StepTiming* timing_out) const {
  const auto& sc = scenario_;
  const std::int64_t n = st.step;
  if (n >= sc.run.horizon) throw DomainError("step beyond the scenario horizon");
  if (sw.last_sealed() != n - 1) {
    throw OutOfOrderError("step " + std::to_string(n) + " needs step " + std::to_string(n - 1) +
                          " sealed first");
  }
  const double dt = sc.run.step_size_s;
  const double t = static_cast<double>(n) * dt;
  const auto& exclude = sc.logging.exclude;
  Publisher sw_pub(sw, n, exclude);
  std::optional<Publisher> hw_pub;
  if (hw) hw_pub.emplace(*hw, n, exclude);
  st.phase_trace.clear();

  StepTiming tm;
  CounterStream delay_rng(sc.run.seed, kDelayStream, static_cast<std::uint64_t>(n));
  const double half = sc.delays.comm_latency_s / 2.0;
  const double up_s = half + sc.delays.jitter_s * delay_rng.uniform();
  const double down_s = half + sc.delays.jitter_s * delay_rng.uniform();

  // measure
  st.phase_trace.push_back(StepPhase::measure);
  const PlantMeasurement m = st.plant.measure();
  tm.send_ms = realtime() ? now_ms() : t * 1000.0;
  if (m.outdoor_limited) ++st.counters.outdoor_limitations;
  if (m.emulator_saturated) ++st.counters.emulator_saturations;
  if (m.hvac_stale) ++st.counters.hvac_stale;
  if (hw_pub) publish_measurement(*hw_pub, m, tm.send_ms);

  // transmit_up
  st.phase_trace.push_back(StepPhase::transmit_up);
  tm.sw_store_ms = tm.send_ms + up_s * 1000.0;
  publish_measurement(sw_pub, m, tm.sw_store_ms);
  publish_command(sw_pub, m.applied, Source::setpoint, tm.sw_store_ms);

  // simulate
  st.phase_trace.push_back(StepPhase::simulate);
  const double sim_start_ms = realtime() ? now_ms() : 0.0;
  const bool injected = injected_at(sc.delays, n);
  if (injected && realtime()) {
    std::this_thread::sleep_for(std::chrono::duration<double>(sc.delays.simulate_delay_s));
  }
  const double sim_s = injected ? sc.delays.simulate_delay_s : 0.0;

  const ZoneState before = st.zone.state();
  std::int64_t actions = 0;
  for (auto& agent : st.agents) {
    if (agent.present_at(t)) {
      const auto local = local_condition(sc.occupants.surrogate, m.discharge, before,
                                         agent.coords, agent.fan_on, sc.occupants.effects);
      if (local.clamped) ++st.counters.surrogate_clamps;
      const double score = comfort_eval(agent, local, sc.occupants.effects);
      CounterStream rng(sc.run.seed, agent.id, static_cast<std::uint64_t>(n));
      auto outcome = behave(agent, score, rng, sc.occupants.effects);
      actions += static_cast<std::int64_t>(outcome.actions.size());
      agent = std::move(outcome.agent);
    }
    advance_timers(agent, dt, sc.occupants.effects);
  }
  st.counters.occupant_actions += actions;
  const OccupantGains gains =
      aggregate_gains(st.agents, t, sc.occupants.thermostat_band_c, sc.occupants.effects);

  SupervisorySetpoints baseline = sc.geb.baseline;
  baseline.cooling_c += gains.thermostat_delta_c;
  baseline.heating_c += gains.thermostat_delta_c;
  const auto& sig = sc.geb.modulation_signal;
  const double signal = sig.empty() ? 0.0 : sig[static_cast<std::size_t>(n) % sig.size()];
  const RbcOutput rbc = rbc_step(sc.geb.rbc, RbcClock{n, t}, baseline, signal, st.last_setpoints);
  SupervisorySetpoints chosen = rbc.setpoints;
  bool clamped = rbc.clamped;
  if (sc.geb.controller == SupervisorKind::slow) {
    if (auto r = st.slow.poll(n)) {
      st.slow_current = *r;
      ++st.counters.slow_applied;
    }
    if (st.slow_current) {
      const double age_s = static_cast<double>(n - st.slow_current->submit_step) * dt;
      if (age_s <= sc.geb.freshness_s) {
        chosen = st.slow_current->setpoints;
        clamped = enforce_bounds(chosen, sc.geb.rbc);
      } else {
        st.slow_current.reset();
        ++st.counters.slow_discarded;
      }
    }
    if (!st.slow.pending()) {
      st.slow.submit(SlowInputs{n, t, before.temperature_c, baseline, rbc.setpoints}, n);
    }
  }
  if (clamped) ++st.counters.geb_clamps;
  st.last_setpoints = chosen;

  const OutdoorCondition& outdoor = weather_->at(n);
  const ZoneState& after = st.zone.step(m.discharge, outdoor, gains, dt);
  const ZoneLoad load = compute_zone_load(after, st.zone.effective_discharge());
  const PlantCommand command{after, outdoor, chosen};

  tm.sim_done_ms = realtime() ? tm.sw_store_ms + (now_ms() - sim_start_ms)
                              : tm.sw_store_ms + sim_s * 1000.0;
  const double done = tm.sim_done_ms;
  const auto S = Source::simulated;
  publish_command(sw_pub, command, S, done);
  const double surface_mean =
      after.surface_temps_c.empty()
          ? after.temperature_c
          : std::accumulate(after.surface_temps_c.begin(), after.surface_temps_c.end(), 0.0) /
                static_cast<double>(after.surface_temps_c.size());
  sw_pub.put("zone.surface.mean", S, "degC", surface_mean, done);
  sw_pub.put("zone.load.sensible", S, "W", load.sensible_w, done);
  sw_pub.put("zone.load.latent", S, "W", load.latent_w, done);
  sw_pub.put("dis.T", S, "degC", st.zone.effective_discharge().temperature_c, done);
  sw_pub.put("dis.m_dot", S, "kg/s", st.zone.effective_discharge().mass_flow_kg_s, done);
  sw_pub.put("occ.sensible", S, "W", gains.sensible_w, done);
  sw_pub.put("occ.latent", S, "W", gains.latent_w, done);
  sw_pub.put("occ.thermostat_delta", S, "degC", gains.thermostat_delta_c, done);
  sw_pub.put("occ.actions", S, "1", static_cast<double>(actions), done);
  sw_pub.put("geb.active", S, "1", flag(rbc.active), done);
  sw_pub.put("geb.clamped", S, "1", flag(clamped), done);

  // transmit_down
  st.phase_trace.push_back(StepPhase::transmit_down);
  tm.hw_recv_ms = tm.sim_done_ms + down_s * 1000.0;
  tm.arrival_s = up_s + sim_s + down_s;
  const double observed_s = (tm.hw_recv_ms - tm.send_ms) / 1000.0;
  const bool late = std::max(tm.arrival_s, observed_s) >= dt;
  if (hw_pub) publish_command(*hw_pub, command, Source::setpoint, tm.hw_recv_ms);

  // actuate
  st.phase_trace.push_back(StepPhase::actuate);
  if (late && !sc.delays.stale_hold) {
    tm.overrun = true;
    ++st.counters.overruns;
    st.counters.overrun_steps.push_back(n);
    if (sc.delays.overrun_policy == OverrunPolicy::abort) {
      throw OverrunAbort("step " + std::to_string(n) + " results arrived after " +
                         std::to_string(std::max(tm.arrival_s, observed_s)) +
                         " s, budget is " + std::to_string(dt) + " s");
    }
  } else {
    if (late) ++st.counters.late_deliveries;
    st.plant.schedule(t + tm.arrival_s, command);
  }
  st.plant.advance(dt);

  // seal
  st.phase_trace.push_back(StepPhase::seal);
  sw.seal(n);
  if (hw) hw->seal(n);
  ++st.step;
  if (timing_out) *timing_out = tm;
  return st;
}

RunResult Orchestrator::run() const {
  using clock = std::chrono::steady_clock;
  const auto& sc = scenario_;
  Datastore sw(sc.run.step_size_s);
  std::optional<Datastore> hw;
  if (sc.logging.hardware_log) hw.emplace(sc.run.step_size_s);

  RunResult result;
  result.pacing.enabled = realtime();
  epoch_ = clock::now();
  const double start_wall_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::system_clock::now().time_since_epoch())
                                   .count();
  SimulationState st = initial_state();
  const double step_ms = sc.run.step_size_s * 1000.0;
  double slack_sum = 0.0;
  result.pacing.min_slack_ms = realtime() ? std::numeric_limits<double>::infinity() : 0.0;

  for (std::int64_t n = 0; n < sc.run.horizon; ++n) {
    if (realtime()) {
      const auto target = epoch_ + std::chrono::duration_cast<clock::duration>(
                                       std::chrono::duration<double, std::milli>(n * step_ms));
      std::this_thread::sleep_until(target);
      const double err = now_ms() - static_cast<double>(n) * step_ms;
      result.pacing.max_start_error_ms = std::max(result.pacing.max_start_error_ms, std::abs(err));
      if (std::abs(err) > kPacingToleranceMs) ++result.pacing.starts_outside_tolerance;
    }
    st = step_once(std::move(st), sw, hw ? &*hw : nullptr);
    if (realtime()) {
      const double slack = static_cast<double>(n + 1) * step_ms - now_ms();
      result.pacing.min_slack_ms = std::min(result.pacing.min_slack_ms, slack);
      slack_sum += slack;
    }
    ++result.pacing.steps;
  }
  if (realtime()) {
    // The plant runs through the last interval before the run ends.
    std::this_thread::sleep_until(
        epoch_ + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double, std::milli>(
                     static_cast<double>(sc.run.horizon) * step_ms)));
    result.pacing.mean_slack_ms = slack_sum / static_cast<double>(result.pacing.steps);
    result.pacing.wall_duration_s = now_ms() / 1000.0;
  }

  const RunMetadata meta{sc.run.id, sc.run.seed, sc.run.step_size_s, start_wall_ms};
  result.log = sw.snapshot(meta);
  if (hw) result.hardware_log = hw->snapshot(meta);
  result.counters = st.counters;
  return result;
}

nlohmann::json run_summary(const Scenario& s, const RunResult& r) {
  const auto& c = r.counters;
  const auto& p = r.pacing;
  nlohmann::json j;
  j["scenario_id"] = s.run.id;
  j["seed"] = s.run.seed;
  j["steps"] = r.log.frames.size();
  j["step_size_s"] = s.run.step_size_s;
  j["mode"] = s.run.mode == RunMode::realtime ? "realtime" : "fast";
  j["overruns"] = c.overruns;
  j["overrun_steps"] = c.overrun_steps;
  j["late_deliveries"] = c.late_deliveries;
  j["outdoor_limitations"] = c.outdoor_limitations;
  j["emulator_saturations"] = c.emulator_saturations;
  j["hvac_stale_steps"] = c.hvac_stale;
  j["geb_clamps"] = c.geb_clamps;
  j["surrogate_clamps"] = c.surrogate_clamps;
  j["occupant_actions"] = c.occupant_actions;
  j["slow_results_applied"] = c.slow_applied;
  j["slow_results_discarded"] = c.slow_discarded;
  j["pacing"] = {{"enabled", p.enabled},
                 {"steps", p.steps},
                 {"min_slack_ms", p.min_slack_ms},
                 {"mean_slack_ms", p.mean_slack_ms},
                 {"max_start_error_ms", p.max_start_error_ms},
                 {"starts_outside_tolerance", p.starts_outside_tolerance},
                 {"tolerance_ms", kPacingToleranceMs},
                 {"wall_duration_s", p.wall_duration_s}};
  return j;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = std::filesystem::path(path.string() + ".partial");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

}  // namespace

OutputFiles write_run_outputs(const Scenario& scenario, const RunResult& result,
                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  OutputFiles f{out_dir / "run.csv", out_dir / "summary.json", out_dir / "scenario.json",
                std::nullopt};
  export_run(result.log, f.run_csv);
  write_text(f.summary_json, run_summary(scenario, result).dump(2) + "\n");
  write_text(f.scenario_json, effective_config(scenario).dump(2) + "\n");
  if (result.hardware_log) {
    f.hardware_csv = out_dir / "hardware.csv";
    export_run(*result.hardware_log, *f.hardware_csv);
  }
  return f;
}

}  // namespace hilft
