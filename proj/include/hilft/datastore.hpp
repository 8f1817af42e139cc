#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace hilft {

enum class Source { emulated, simulated, setpoint };

std::string_view to_string(Source s);
std::optional<Source> parse_source(std::string_view text);

// Identity is (name, source); the unit travels with the key but does not
// take part in ordering or equality.
struct VariableKey {
  std::string name;
  Source source = Source::simulated;
  std::string unit;

  friend bool operator<(const VariableKey& a, const VariableKey& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.source < b.source;
  }
  friend bool operator==(const VariableKey& a, const VariableKey& b) {
    return a.name == b.name && a.source == b.source;
  }
};

// Parses "name:source" (unit left empty).
VariableKey parse_key(std::string_view text);
std::string format_key(const VariableKey& key);

struct Sample {
  std::int64_t step_index = 0;
  double sim_time_s = 0.0;
  double value = 0.0;
  std::optional<double> wall_time_ms;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Frame {
  std::int64_t step_index = 0;
  std::map<VariableKey, Sample> entries;

  const Sample* find(const VariableKey& key) const;
  friend bool operator==(const Frame& a, const Frame& b);
};

struct RunMetadata {
  std::string scenario_id;
  std::uint64_t seed = 0;
  double step_size_s = 60.0;
  double start_wall_ms = 0.0;
};

struct RunLog {
  RunMetadata metadata;
  std::vector<Frame> frames;

  // Compares frames only: metadata is not carried by the CSV export.
  friend bool operator==(const RunLog& a, const RunLog& b);
};

struct SeriesQuery {
  std::vector<Sample> samples;
  std::vector<std::int64_t> gaps;
};

// Per-step keyed store. Writers may run concurrently within the open
// steps; a sealed frame is immutable and shared by pointer.
class Datastore {
 public:
  explicit Datastore(double step_size_s = 60.0);

  Datastore(const Datastore&) = delete;
  Datastore& operator=(const Datastore&) = delete;

  double step_size_s() const { return step_size_s_; }

  // Registers the key if new. Throws DataIntegrityError on an invalid name
  // or a unit that disagrees with an earlier registration.
  void register_key(const VariableKey& key);
  std::vector<VariableKey> keys() const;

  void upsert_sample(const VariableKey& key, const Sample& sample);

  // Convenience overload that derives sim_time_s from the step index.
  void upsert(const VariableKey& key, std::int64_t step, double value,
              std::optional<double> wall_time_ms = std::nullopt);

  // Seals `step`; requires step == last_sealed() + 1.
  void seal(std::int64_t step);
  std::int64_t last_sealed() const;

  // nullptr when the step is unknown or not yet sealed.
  std::shared_ptr<const Frame> fetch_frame(std::int64_t step) const;

  // Inclusive range; a reversed range yields an empty result.
  SeriesQuery query_series(const VariableKey& key, std::int64_t first,
                           std::int64_t last) const;

  RunLog snapshot(RunMetadata metadata) const;

 private:
  double step_size_s_;
  mutable std::shared_mutex mutex_;
  std::map<VariableKey, std::string> registry_;
  std::map<std::int64_t, Frame> open_;
  std::vector<std::shared_ptr<const Frame>> sealed_;
};

struct ExportSummary {
  std::size_t rows = 0;
  std::vector<std::filesystem::path> files;
};

inline constexpr std::string_view kCsvHeader =
    "step_index,sim_time_s,variable,source,unit,value,wall_time_ms";

// Long-format CSV. The file is written to a temporary sibling and renamed,
// so a failed export leaves nothing behind.
ExportSummary export_run(const RunLog& log, const std::filesystem::path& destination);
std::string export_to_string(const RunLog& log);

// Rebuilds a RunLog from an export. Steps with no rows between 0 and the
// last exported step come back as empty frames.
RunLog import_run(const std::filesystem::path& source);
RunLog import_from_string(const std::string& csv);

// Decimal form used for every floating-point CSV field (17 significant
// digits, exact for IEEE doubles).
std::string format_double(double v);

}  // namespace hilft
