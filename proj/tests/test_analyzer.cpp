#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hilft/analyzer.hpp"
#include "hilft/error.hpp"

using namespace hilft;

namespace {

Series make(std::initializer_list<double> v) {
  Series s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s[i++] = x;
  return s;
}

Series random_walk(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> step(0.0, 1.0);
  Series s(n);
  double x = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s[i] = (x += step(rng));
  return s;
}

// b_t = a_{t-d} with the first d samples held at a_0.
Series delayed(const Series& a, Eigen::Index d) {
  Series b(a.size());
  for (Eigen::Index t = 0; t < a.size(); ++t) b[t] = a[std::max<Eigen::Index>(t - d, 0)];
  return b;
}

}  // namespace

// --- rmse_shift -------------------------------------------------------------

TEST(RmseShift, IdenticalSeriesIsZero) {
  const auto a = make({1.0, 4.0, 2.0, 8.0});
  EXPECT_EQ(rmse_shift(a, a, 0), 0.0);
}

TEST(RmseShift, ConstructedDelayRecoveredByNegativeShift) {
  const auto a = make({0.0, 1.0, 3.0, 2.0, 5.0, 4.0});
  const auto b = delayed(a, 1);
  EXPECT_EQ(rmse_shift(a, b, -1), 0.0);
  EXPECT_EQ(rmse_shift(b, a, 1), 0.0);
  EXPECT_GT(rmse_shift(a, b, 0), 0.0);
}

TEST(RmseShift, AlternatingExample) {
  EXPECT_DOUBLE_EQ(rmse_shift(make({0, 1, 0, 1}), make({1, 0, 1, 0}), 0), 1.0);
}

TEST(RmseShift, OverlapBelowTwoIsInsufficient) {
  const auto a = make({1, 2, 3});
  EXPECT_THROW(rmse_shift(a, a, 2), InsufficientDataError);
  EXPECT_THROW(rmse_shift(a, a, -5), InsufficientDataError);
  EXPECT_THROW(rmse_shift(a, make({1, 2}), 0), InsufficientDataError);
  EXPECT_NO_THROW(rmse_shift(a, a, 1));
}

TEST(RmseShift, DirectFormulaOnRandomSeries) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_walk(rng, 40), b = random_walk(rng, 40);
    const std::int64_t s = static_cast<std::int64_t>(rng() % 21) - 10;
    double sum = 0.0;
    int count = 0;
    for (int t = 0; t < 40; ++t) {
      const int u = t - static_cast<int>(s);
      if (u < 0 || u >= 40) continue;
      sum += (a[t] - b[u]) * (a[t] - b[u]);
      ++count;
    }
    ASSERT_NEAR(rmse_shift(a, b, s), std::sqrt(sum / count), 1e-12);
  }
}

TEST(RmseShift, SwapNegatesShiftAndScalingIsLinear) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_walk(rng, 30), b = random_walk(rng, 30);
    const std::int64_t s = static_cast<std::int64_t>(rng() % 11) - 5;
    ASSERT_NEAR(rmse_shift(a, b, s), rmse_shift(b, a, -s), 1e-12);
    const double c = -3.25;
    ASSERT_NEAR(rmse_shift(c * a, c * b, s), std::abs(c) * rmse_shift(a, b, s), 1e-9);
  }
}

TEST(RmseShift, BestShiftFindsKnownDelayUnderNoise) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (Eigen::Index d = 0; d <= 5; ++d) {
    const auto a = random_walk(rng, 300);
    Series b = delayed(a, d);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] += noise(rng);
    EXPECT_EQ(best_shift(a, b, 8), -d);
    EXPECT_EQ(best_shift(b, a, 8), d);
  }
}

// --- response_time ----------------------------------------------------------

namespace {

Series first_order_step(double y0, double y1, double tau, int lead, int n) {
  Series y(n);
  for (int k = 0; k < n; ++k) {
    y[k] = k < lead ? y0 : y1 + (y0 - y1) * std::exp(-(k - lead) / tau);
  }
  return y;
}

}  // namespace

TEST(ResponseTime, FirstOrderTauRecovered) {
  const auto y = first_order_step(21.1, 22.2, 120.0, 60, 1500);
  const double t = response_time(y, 1.0, 60, 60);
  EXPECT_NEAR(t, 120.0, 1.0);
}

TEST(ResponseTime, InstantaneousStepIsZero) {
  Series y = Series::Constant(50, 1.0);
  y.tail(30).setConstant(2.0);
  EXPECT_EQ(response_time(y, 1.0, 20, 10), 0.0);
}

TEST(ResponseTime, FlatSeriesIsNoResponse) {
  EXPECT_THROW(response_time(Series::Constant(50, 3.0), 1.0, 20, 10), NoResponseError);
}

TEST(ResponseTime, NoisyLeadIsProtocolViolation) {
  auto y = first_order_step(0.0, 1.0, 10.0, 20, 200);
  for (int k = 0; k < 20; k += 2) y[k] = 0.2;
  EXPECT_THROW(response_time(y, 1.0, 20, 20), ProtocolViolationError);
}

TEST(ResponseTime, InvariantUnderAffineTransforms) {
  const auto y = first_order_step(0.0, 1.0, 37.0, 30, 600);
  const double base = response_time(y, 0.5, 30, 50);
  for (double scale : {2.0, -1.5, 1e3}) {
    for (double offset : {0.0, -40.0, 1234.5}) {
      const Series z = (scale * y).array() + offset;
      EXPECT_NEAR(response_time(z, 0.5, 30, 50), base, 1e-9 * std::max(1.0, base));
    }
  }
}

// --- hunting ----------------------------------------------------------------

TEST(Hunting, ConstantTrackingIsQuiet) {
  const Series sp = Series::Constant(200, 22.0);
  const auto v = hunting_metric(sp, sp, 60.0);
  EXPECT_FALSE(v.is_hunting);
  EXPECT_EQ(v.crossings, 0);
  EXPECT_EQ(v.peak_to_peak, 0.0);
}

TEST(Hunting, SinusoidIsHuntingWithItsPeriod) {
  const int n = 2400 + 1;
  Series pv(n), sp = Series::Constant(n, 22.0);
  for (int k = 0; k < n; ++k) pv[k] = 22.0 + std::sin(2.0 * std::numbers::pi * (k + 0.3) / 240.0);
  const auto v = hunting_metric(pv, sp, 1.0);
  EXPECT_TRUE(v.is_hunting);
  EXPECT_GE(v.crossings, 6);
  ASSERT_TRUE(v.period_s.has_value());
  EXPECT_NEAR(*v.period_s, 240.0, 1.0);
  EXPECT_NEAR(v.peak_to_peak, 2.0, 1e-3);
}

TEST(Hunting, DecayedOscillationIsNotHunting) {
  const int n = 2401;
  Series pv(n), sp = Series::Constant(n, 22.0);
  for (int k = 0; k < n; ++k) {
    pv[k] = 22.0 + 2.0 * std::exp(-k / 100.0) * std::sin(2.0 * std::numbers::pi * k / 240.0);
  }
  EXPECT_FALSE(hunting_metric(pv, sp, 1.0).is_hunting);
}

TEST(Hunting, ShortWindowIsInsufficient) {
  const Series s = Series::Constant(12, 1.0);
  EXPECT_THROW(hunting_metric(s, s, 60.0), InsufficientDataError);
}

// --- delay bound ------------------------------------------------------------

namespace {

struct LogPair {
  RunLog hw, sw;
};

LogPair synthetic_logs(int steps, double latency_s, double extra_max_s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> extra(0.0, extra_max_s);
  LogPair p;
  const VariableKey emu{"zone.T", Source::emulated, "degC"};
  const VariableKey spt{"zone.T", Source::setpoint, "degC"};
  const VariableKey sim{"zone.T", Source::simulated, "degC"};
  for (int n = 0; n < steps; ++n) {
    const double send = n * 60000.0;
    Frame hw{n, {}}, sw{n, {}};
    hw.entries[emu] = Sample{n, n * 60.0, 24.0, send};
    hw.entries[spt] = Sample{n, n * 60.0, 24.0, send + 1000.0 * (latency_s + extra(rng))};
    sw.entries[sim] = Sample{n, n * 60.0, 24.0, std::nullopt};
    p.hw.frames.push_back(hw);
    p.sw.frames.push_back(sw);
  }
  return p;
}

}  // namespace

TEST(DelayBound, ZeroLatencyIsZero) {
  std::mt19937_64 rng(1);
  const auto p = synthetic_logs(10, 0.0, 0.0, rng);
  EXPECT_EQ(comm_delay_bound(p.hw, p.sw), 0.0);
}

TEST(DelayBound, NeverBelowInjectedLatency) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(0.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double l = lat(rng);
    const auto p = synthetic_logs(20, l, 5.0, rng);
    const double b = comm_delay_bound(p.hw, p.sw);
    ASSERT_GE(b, l);
    ASSERT_LE(b, l + 5.0);
  }
}

TEST(DelayBound, UnmatchedLogsAreInsufficient) {
  std::mt19937_64 rng(1);
  const auto p = synthetic_logs(5, 5.0, 0.0, rng);
  EXPECT_THROW(comm_delay_bound(p.hw, RunLog{}), InsufficientDataError);
}

// --- capacity ---------------------------------------------------------------

TEST(Capacity, Examples) {
  const auto ok = capacity_check(8000.0, 10000.0);
  EXPECT_DOUBLE_EQ(ok.ratio, 0.8);
  EXPECT_EQ(ok.verdict, CapacityVerdict::ok);
  const auto under = capacity_check(12000.0, 10000.0);
  EXPECT_DOUBLE_EQ(under.ratio, 1.2);
  EXPECT_EQ(under.verdict, CapacityVerdict::undersized);
  EXPECT_EQ(capacity_check(1000.0, 10000.0).verdict, CapacityVerdict::oversized);
  EXPECT_THROW(capacity_check(0.0, 10000.0), DomainError);
  EXPECT_THROW(capacity_check(100.0, -1.0), DomainError);
}

// --- extraction -------------------------------------------------------------

TEST(ExtractSeries, UnknownKeyAndGaps) {
  RunLog log;
  const VariableKey k{"x", Source::simulated, ""};
  for (int n = 0; n < 3; ++n) {
    Frame f{n, {}};
    if (n != 1) f.entries[k] = Sample{n, n * 60.0, 1.0 * n, std::nullopt};
    log.frames.push_back(f);
  }
  EXPECT_THROW(extract_series(log, {"y", Source::simulated, ""}), UnknownKeyError);
  EXPECT_THROW(extract_series(log, k), InsufficientDataError);
  log.frames[1].entries[k] = Sample{1, 60.0, 1.0, std::nullopt};
  EXPECT_EQ(extract_series(log, k), make({0.0, 1.0, 2.0}));
}
