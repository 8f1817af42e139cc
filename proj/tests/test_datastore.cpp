#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "hilft/datastore.hpp"
#include "hilft/error.hpp"
#include "test_support.hpp"

using namespace hilft;

namespace {

const VariableKey kT{"zone1.T", Source::simulated, "degC"};

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

RunLog random_log(std::mt19937_64& rng, int steps, int keys) {
  Datastore store(60.0);
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  std::uniform_int_distribution<int> coin(0, 3);
  const Source sources[] = {Source::emulated, Source::simulated, Source::setpoint};
  for (int n = 0; n < steps; ++n) {
    for (int k = 0; k < keys; ++k) {
      if (k > 0 && coin(rng) == 0) continue;  // leave holes, keep every step non-empty
      const VariableKey key{"v" + std::to_string(k), sources[k % 3], k % 2 ? "W" : "degC"};
      // Values spanning many binades, including subnormals.
      double v = std::ldexp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng),
                            static_cast<int>(mag(rng) * 3.4));
      if (coin(rng) == 1) v = std::numeric_limits<double>::denorm_min() * (k + 1);
      std::optional<double> wall;
      if (coin(rng) != 2) wall = std::uniform_real_distribution<double>(0, 1e9)(rng);
      store.upsert(key, n, v, wall);
    }
    store.seal(n);
  }
  return store.snapshot(RunMetadata{"rand", 1, 60.0, 0.0});
}

}  // namespace

TEST(Datastore, SingleWriteReadsBack) {
  Datastore s;
  s.upsert(kT, 0, 21.0);
  s.seal(0);
  s.upsert(kT, 5, 21.0);
  for (int n = 1; n <= 5; ++n) s.seal(n);
  const auto f = s.fetch_frame(5);
  ASSERT_NE(f, nullptr);
  ASSERT_NE(f->find(kT), nullptr);
  EXPECT_EQ(f->find(kT)->value, 21.0);
}

TEST(Datastore, SecondUpsertReplaces) {
  Datastore s;
  s.upsert(kT, 0, 21.0);
  s.upsert(kT, 0, 22.0);
  s.seal(0);
  const auto f = s.fetch_frame(0);
  EXPECT_EQ(f->entries.size(), 1u);
  EXPECT_EQ(f->find(kT)->value, 22.0);
  EXPECT_EQ(s.query_series(kT, 0, 0).samples.size(), 1u);
}

TEST(Datastore, WriteToSealedStepIsOutOfOrder) {
  Datastore s;
  for (int n = 0; n <= 5; ++n) s.seal(n);
  EXPECT_THROW(s.upsert(kT, 3, 1.0), OutOfOrderError);
  EXPECT_THROW(s.upsert(kT, 5, 1.0), OutOfOrderError);
  EXPECT_NO_THROW(s.upsert(kT, 6, 1.0));
}

TEST(Datastore, RejectsNonFiniteValues) {
  Datastore s;
  EXPECT_THROW(s.upsert(kT, 0, std::nan("")), DataIntegrityError);
  EXPECT_THROW(s.upsert(kT, 0, INFINITY), DataIntegrityError);
}

TEST(Datastore, RejectsBadNamesAndUnitConflicts) {
  Datastore s;
  EXPECT_THROW(s.register_key({"", Source::emulated, "W"}), DataIntegrityError);
  EXPECT_THROW(s.register_key({"zone T", Source::emulated, "W"}), DataIntegrityError);
  s.register_key({"p", Source::emulated, "W"});
  EXPECT_THROW(s.register_key({"p", Source::emulated, "kW"}), DataIntegrityError);
  EXPECT_NO_THROW(s.register_key({"p", Source::simulated, "kW"}));
}

TEST(Datastore, SealMustBeSequential) {
  Datastore s;
  EXPECT_THROW(s.seal(1), OutOfOrderError);
  s.seal(0);
  EXPECT_THROW(s.seal(0), OutOfOrderError);
  EXPECT_EQ(s.last_sealed(), 0);
}

TEST(Datastore, FetchAfterSealHasAllKeys) {
  Datastore s;
  const VariableKey a{"a", Source::emulated, "1"};
  const VariableKey b{"b", Source::setpoint, "1"};
  s.upsert(a, 0, 1.0);
  s.upsert(b, 0, 2.0);
  s.seal(0);
  const auto f = s.fetch_frame(0);
  ASSERT_TRUE(f);
  EXPECT_NE(f->find(a), nullptr);
  EXPECT_NE(f->find(b), nullptr);
}

TEST(Datastore, FetchUnsealedIsNotAvailable) {
  Datastore s;
  for (int n = 0; n <= 5; ++n) s.seal(n);
  EXPECT_EQ(s.fetch_frame(10), nullptr);
  EXPECT_EQ(s.fetch_frame(-1), nullptr);
}

TEST(Datastore, ConcurrentWritersYieldStableFrame) {
  for (int trial = 0; trial < 20; ++trial) {
    Datastore s;
    std::vector<std::thread> writers;
    for (int w = 0; w < 8; ++w) {
      writers.emplace_back([&s, w, trial] {
        for (int k = 0; k < 50; ++k) {
          const int id = (k * 7 + w * 13 + trial) % 50;
          s.upsert({"w" + std::to_string(w) + ".k" + std::to_string(id), Source::simulated, "1"},
                   0, w * 100.0 + id);
        }
      });
    }
    for (auto& t : writers) t.join();
    s.seal(0);
    const auto f1 = s.fetch_frame(0);
    const auto f2 = s.fetch_frame(0);
    ASSERT_EQ(f1->entries.size(), 400u);
    EXPECT_EQ(*f1, *f2);

    // Same writes applied serially in another order.
    Datastore serial;
    for (int w = 7; w >= 0; --w) {
      for (int id = 49; id >= 0; --id) {
        serial.upsert({"w" + std::to_string(w) + ".k" + std::to_string(id), Source::simulated, "1"},
                      0, w * 100.0 + id);
      }
    }
    serial.seal(0);
    EXPECT_EQ(*f1, *serial.fetch_frame(0));
  }
}

TEST(Datastore, QuerySeriesFullRange) {
  Datastore s;
  for (int n = 0; n <= 3; ++n) {
    s.upsert(kT, n, n * 1.5);
    s.seal(n);
  }
  const auto q = s.query_series(kT, 0, 3);
  ASSERT_EQ(q.samples.size(), 4u);
  EXPECT_TRUE(q.gaps.empty());
  for (int n = 0; n <= 3; ++n) {
    EXPECT_EQ(q.samples[n].step_index, n);
    EXPECT_EQ(q.samples[n].sim_time_s, n * 60.0);
  }
}

TEST(Datastore, QuerySeriesReportsGaps) {
  Datastore s;
  for (int n = 0; n <= 3; ++n) {
    if (n != 2) s.upsert(kT, n, 1.0);
    s.seal(n);
  }
  const auto q = s.query_series(kT, 0, 3);
  EXPECT_EQ(q.samples.size(), 3u);
  ASSERT_EQ(q.gaps.size(), 1u);
  EXPECT_EQ(q.gaps[0], 2);
}

TEST(Datastore, ReversedRangeIsEmpty) {
  Datastore s;
  s.upsert(kT, 0, 1.0);
  s.seal(0);
  const auto q = s.query_series(kT, 3, 0);
  EXPECT_TRUE(q.samples.empty());
  EXPECT_TRUE(q.gaps.empty());
}

TEST(Datastore, QueryErrors) {
  Datastore s;
  s.upsert(kT, 0, 1.0);
  s.seal(0);
  EXPECT_THROW(s.query_series({"nope", Source::simulated, ""}, 0, 0), UnknownKeyError);
  EXPECT_THROW(s.query_series(kT, 0, 4), NotAvailableError);
}

TEST(Export, RowCountIsKeysTimesSteps) {
  Datastore s;
  for (int n = 0; n < 10; ++n) {
    for (int k = 0; k < 3; ++k) s.upsert({"k" + std::to_string(k), Source::emulated, "1"}, n, n + k);
    s.seal(n);
  }
  test_support::TempDir dir;
  const auto summary = export_run(s.snapshot({}), dir / "run.csv");
  EXPECT_EQ(summary.rows, 30u);
  ASSERT_EQ(summary.files.size(), 1u);
  const auto text = test_support::read_file(dir / "run.csv");
  EXPECT_EQ(count_lines(text), 31u);
  EXPECT_EQ(text.substr(0, text.find('\n')), std::string(kCsvHeader));
}

TEST(Export, EmptyRunIsHeaderOnly) {
  test_support::TempDir dir;
  const auto summary = export_run(RunLog{}, dir / "empty.csv");
  EXPECT_EQ(summary.rows, 0u);
  EXPECT_EQ(test_support::read_file(dir / "empty.csv"), std::string(kCsvHeader) + "\n");
}

TEST(Export, WallTimeColumnEmptyWhenAbsent) {
  Datastore s;
  s.upsert(kT, 0, 0.1);
  s.seal(0);
  const auto text = export_to_string(s.snapshot({}));
  EXPECT_NE(text.find("0,0,zone1.T,simulated,degC,0.10000000000000001,\n"), std::string::npos)
      << text;
}

TEST(Export, UnwritableDestinationLeavesNothing) {
  test_support::TempDir dir;
  const auto target = dir / "missing" / "run.csv";
  EXPECT_THROW(export_run(RunLog{}, target), IoError);
  EXPECT_FALSE(std::filesystem::exists(target));
  EXPECT_FALSE(std::filesystem::exists(target.string() + ".partial"));
}

TEST(Export, ImportNamesMalformedRow) {
  const std::string csv = std::string(kCsvHeader) +
                          "\n0,0,a,emulated,1,1.0,\n1,60,a,emulated,1,oops,\n";
  try {
    import_from_string(csv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
  EXPECT_THROW(import_from_string("bad,header\n"), ParseError);
  EXPECT_THROW(import_from_string(std::string(kCsvHeader) + "\n0,0,a,elsewhere,1,1,\n"),
               ParseError);
}

TEST(Export, RoundTripPropertyOverRandomLogs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const RunLog log = random_log(rng, 1 + trial % 17, 1 + trial % 6);
    const std::string first = export_to_string(log);
    const RunLog back = import_from_string(first);
    EXPECT_EQ(back, log) << "trial " << trial;
    EXPECT_EQ(export_to_string(back), first) << "trial " << trial;
  }
}

TEST(Export, FileRoundTripIsByteIdentical) {
  std::mt19937_64 rng(7);
  const RunLog log = random_log(rng, 25, 5);
  test_support::TempDir dir;
  export_run(log, dir / "a.csv");
  export_run(import_run(dir / "a.csv"), dir / "b.csv");
  EXPECT_EQ(test_support::read_file(dir / "a.csv"), test_support::read_file(dir / "b.csv"));
}
