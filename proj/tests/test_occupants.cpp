#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hilft/building.hpp"
#include "hilft/occupants.hpp"

using namespace hilft;

namespace {

ZoneState zone_at(double t, std::vector<double> surfaces = {}) {
  ZoneState z;
  z.temperature_c = t;
  z.rh_pct = 50.0;
  z.surface_temps_c = std::move(surfaces);
  return z;
}

OccupantAgent agent_with(ActionType a, double p) {
  OccupantAgent ag;
  ag.action_probs[static_cast<std::size_t>(a)] = p;
  return ag;
}

LocalCondition local_at(double t) {
  LocalCondition l;
  l.temperature_c = t;
  l.effective_temperature_c = t;
  return l;
}

}  // namespace

// --- surrogate --------------------------------------------------------------

TEST(LocalCondition, EqualInputsReturnThatTemperature) {
  NearOccupantSurrogate s;
  s.surface_weight = 0.4;
  s.decay_length_m = 3.0;
  const auto l = local_condition(s, {22.0, 50.0, 0.3}, zone_at(22.0, {22.0, 22.0, 22.0}),
                                 {2.0, 3.0, 1.1}, false);
  EXPECT_DOUBLE_EQ(l.temperature_c, 22.0);
  EXPECT_FALSE(l.clamped);
}

TEST(LocalCondition, WeightedMeanArithmetic) {
  NearOccupantSurrogate s;  // 0.3 discharge, 0.7 zone
  const auto l = local_condition(s, {14.0, 50.0, 0.3}, zone_at(24.0), {1.0, 1.0, 1.0}, false);
  EXPECT_NEAR(l.temperature_c, 21.0, 1e-12);
}

TEST(LocalCondition, FanLowersEffectiveTemperature) {
  NearOccupantSurrogate s;
  const auto off = local_condition(s, {14.0, 50.0, 0.3}, zone_at(24.0), {1, 1, 1}, false);
  const auto on = local_condition(s, {14.0, 50.0, 0.3}, zone_at(24.0), {1, 1, 1}, true);
  EXPECT_EQ(on.temperature_c, off.temperature_c);
  EXPECT_NEAR(on.effective_temperature_c, off.effective_temperature_c - 0.8, 1e-12);
}

TEST(LocalCondition, OutOfBoundsCoordinatesAreClampedAndFlagged) {
  NearOccupantSurrogate s;
  s.decay_length_m = 2.0;
  const DischargeAir d{14.0, 50.0, 0.3};
  const auto outside = local_condition(s, d, zone_at(24.0), {15.0, -2.0, 1.0}, false);
  const auto edge = local_condition(s, d, zone_at(24.0), {10.0, 0.0, 1.0}, false);
  EXPECT_TRUE(outside.clamped);
  EXPECT_EQ(outside.temperature_c, edge.temperature_c);
}

TEST(LocalCondition, StaysInsideConvexHullOfInputs) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(5.0, 40.0), w(0.0, 1.0), pos(-2.0, 12.0);
  for (int k = 0; k < 5000; ++k) {
    NearOccupantSurrogate s;
    s.discharge_weight = w(rng);
    s.surface_weight = w(rng);
    s.decay_length_m = k % 2 ? 4.0 * w(rng) : 0.0;
    std::vector<double> surfaces{t(rng), t(rng), t(rng)};
    const double td = t(rng), tz = t(rng);
    const auto l = local_condition(s, {td, 50.0, 0.2}, zone_at(tz, surfaces),
                                   {pos(rng), pos(rng), pos(rng)}, false);
    const double lo = std::min({td, tz, surfaces[0], surfaces[1], surfaces[2]});
    const double hi = std::max({td, tz, surfaces[0], surfaces[1], surfaces[2]});
    ASSERT_GE(l.temperature_c, lo - 1e-12);
    ASSERT_LE(l.temperature_c, hi + 1e-12);
  }
}

// --- comfort ----------------------------------------------------------------

TEST(Comfort, PreferredTemperatureScoresZero) {
  OccupantAgent a;
  EXPECT_EQ(comfort_eval(a, local_at(a.t_pref_c)), 0.0);
}

TEST(Comfort, BandArithmetic) {
  OccupantAgent a;
  a.t_pref_c = 22.0;
  a.deadband_c = 1.0;
  EXPECT_NEAR(comfort_eval(a, local_at(24.5)), 1.5, 1e-12);
  EXPECT_NEAR(comfort_eval(a, local_at(19.0)), -2.0, 1e-12);
}

TEST(Comfort, ActiveDrinkOffsetComposes) {
  OccupantAgent a;
  a.t_pref_c = 22.0;
  a.deadband_c = 1.0;
  a.drink_offset_c = -0.5;
  a.drink_timer_s = ActionEffects{}.drink_duration_s;
  EXPECT_NEAR(comfort_eval(a, local_at(24.5)), 1.0, 1e-12);
}

TEST(Comfort, DrinkOffsetDecaysWithTimer) {
  OccupantAgent a;
  a.drink_offset_c = -0.5;
  a.drink_timer_s = 900.0;
  advance_timers(a, 450.0);
  EXPECT_NEAR(comfort_eval(a, local_at(25.0)), 2.0 - 0.25, 1e-12);
  advance_timers(a, 600.0);
  EXPECT_EQ(a.drink_timer_s, 0.0);
  EXPECT_EQ(a.drink_offset_c, 0.0);
}

// --- behavior ---------------------------------------------------------------

TEST(Behave, ZeroProbabilitiesNeverAct) {
  OccupantAgent a;
  for (std::uint64_t n = 0; n < 1000; ++n) {
    CounterStream rng(1, 1, n);
    ASSERT_TRUE(behave(a, n % 2 ? 2.0 : -2.0, rng).actions.empty());
  }
}

TEST(Behave, CertainHeaterToggleWhenCold) {
  auto a = agent_with(ActionType::heater_toggle, 1.0);
  CounterStream rng(1, 1, 0);
  const auto out = behave(a, -1.0, rng);
  ASSERT_EQ(out.actions.size(), 1u);
  EXPECT_EQ(out.actions[0], ActionType::heater_toggle);
  EXPECT_TRUE(out.agent.heater_on);
}

TEST(Behave, NothingFiresInsideBand) {
  OccupantAgent a;
  a.action_probs.fill(1.0);
  CounterStream rng(3, 3, 3);
  EXPECT_TRUE(behave(a, 0.0, rng).actions.empty());
}

TEST(Behave, EmpiricalRateMatchesProbability) {
  const auto a = agent_with(ActionType::thermostat_adjust, 0.3);
  int fired = 0;
  for (std::uint64_t n = 0; n < 10000; ++n) {
    CounterStream rng(2024, 7, n);
    fired += static_cast<int>(behave(a, 1.0, rng).actions.size());
  }
  const double rate = fired / 10000.0;
  EXPECT_GE(rate, 0.285);
  EXPECT_LE(rate, 0.315);
}

TEST(Behave, SameSeedSameActions) {
  OccupantAgent a;
  a.action_probs.fill(0.4);
  auto run = [&](std::uint64_t seed) {
    std::vector<ActionType> all;
    OccupantAgent ag = a;
    for (std::uint64_t n = 0; n < 500; ++n) {
      CounterStream rng(seed, 9, n);
      auto out = behave(ag, n % 3 == 0 ? -1.0 : 1.0, rng);
      all.insert(all.end(), out.actions.begin(), out.actions.end());
      ag = out.agent;
      advance_timers(ag, 60.0);
    }
    return all;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Behave, AgentInvariantsHold) {
  OccupantAgent a;
  a.action_probs.fill(0.5);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> score(-3.0, 3.0);
  for (std::uint64_t n = 0; n < 3000; ++n) {
    CounterStream rng(1, 2, n);
    a = behave(a, score(gen), rng).agent;
    advance_timers(a, 60.0);
    ASSERT_GE(a.clo, a.clo_min);
    ASSERT_LE(a.clo, a.clo_max);
    ASSERT_GE(a.drink_timer_s, 0.0);
    ASSERT_GE(a.walk_timer_s, 0.0);
  }
}

TEST(Behave, FanNeverWarmsWhenHot) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0), t(15.0, 35.0);
  NearOccupantSurrogate s;
  for (int k = 0; k < 2000; ++k) {
    OccupantAgent a;
    a.action_probs.fill(u(gen));
    a.fan_on = u(gen) < 0.5;
    const ZoneState z = zone_at(t(gen));
    const DischargeAir d{t(gen), 50.0, 0.2};
    const auto before = local_condition(s, d, z, a.coords, a.fan_on);
    const double score = comfort_eval(a, before);
    if (score <= 0.0) continue;
    CounterStream rng(1, 1, static_cast<std::uint64_t>(k));
    const auto after = behave(a, score, rng).agent;
    ASSERT_LE(local_condition(s, d, z, a.coords, after.fan_on).effective_temperature_c,
              before.effective_temperature_c);
  }
}

TEST(Behave, HeaterNeverCoolsWhenCold) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ActionEffects e;
  for (int k = 0; k < 2000; ++k) {
    OccupantAgent a;
    a.action_probs.fill(u(gen));
    a.heater_on = u(gen) < 0.5;
    CounterStream rng(4, 4, static_cast<std::uint64_t>(k));
    const auto after = behave(a, -1.0 - u(gen), rng).agent;
    const double before_w = aggregate_gains({a}, 0.0, 2.0, e).sensible_w;
    const double after_w = aggregate_gains({after}, 0.0, 2.0, e).sensible_w;
    ASSERT_GE(after_w, before_w);
  }
}

// --- aggregation ------------------------------------------------------------

TEST(Aggregate, NoAgentsNoGains) {
  EXPECT_EQ(aggregate_gains({}, 0.0), (OccupantGains{0.0, 0.0, 0.0}));
}

TEST(Aggregate, HeaterAddsToMetabolic) {
  OccupantAgent a;
  a.heater_on = true;
  EXPECT_DOUBLE_EQ(aggregate_gains({a}, 0.0).sensible_w, 875.0);
}

TEST(Aggregate, MatchesIndependentRecomputation) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ActionEffects e;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<OccupantAgent> agents(gen() % 8);
    double sens = 0.0, lat = 0.0, delta = 0.0;
    const double t = 3600.0 * u(gen);
    for (auto& a : agents) {
      a.heater_on = u(gen) < 0.5;
      a.walk_timer_s = u(gen) < 0.3 ? 120.0 : 0.0;
      a.thermostat_delta_c = 6.0 * u(gen) - 3.0;
      if (u(gen) < 0.3) a.present_from_s = 1800.0;
      delta += a.thermostat_delta_c;
      if (a.present_from_s && t < *a.present_from_s) continue;
      sens += 75.0 + (a.heater_on ? 800.0 : 0.0) + (a.walk_timer_s > 0.0 ? 100.0 : 0.0);
      lat += 55.0;
    }
    const auto g = aggregate_gains(agents, t, 2.0, e);
    ASSERT_NEAR(g.sensible_w, sens, 1e-9);
    ASSERT_NEAR(g.latent_w, lat, 1e-9);
    const double mean = agents.empty() ? 0.0 : delta / static_cast<double>(agents.size());
    ASSERT_NEAR(g.thermostat_delta_c, std::clamp(mean, -2.0, 2.0), 1e-12);
  }
}

TEST(Actions, NamesRoundTrip) {
  for (auto a : kAllActions) EXPECT_EQ(parse_action(to_string(a)), a);
  EXPECT_FALSE(parse_action("dance").has_value());
}
