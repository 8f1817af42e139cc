#include "hilft/datastore.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hilft/error.hpp"

namespace hilft {

std::string_view to_string(Source s) {
  switch (s) {
    case Source::emulated: return "emulated";
    case Source::simulated: return "simulated";
    case Source::setpoint: return "setpoint";
  }
  return "simulated";
}

std::optional<Source> parse_source(std::string_view text) {
  if (text == "emulated" || text == "emu") return Source::emulated;
  if (text == "simulated" || text == "sim") return Source::simulated;
  if (text == "setpoint" || text == "spt") return Source::setpoint;
  return std::nullopt;
}

VariableKey parse_key(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw UnknownKeyError("expected name:source, got '" + std::string(text) + "'");
  }
  auto source = parse_source(text.substr(colon + 1));
  if (!source) {
    throw UnknownKeyError("unknown source in '" + std::string(text) + "'");
  }
  return VariableKey{std::string(text.substr(0, colon)), *source, {}};
}

std::string format_key(const VariableKey& key) {
  return key.name + ":" + std::string(to_string(key.source));
}

const Sample* Frame::find(const VariableKey& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

bool operator==(const Frame& a, const Frame& b) {
  if (a.step_index != b.step_index || a.entries.size() != b.entries.size()) return false;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  for (; ia != a.entries.end(); ++ia, ++ib) {
    if (!(ia->first == ib->first) || ia->first.unit != ib->first.unit) return false;
    if (!(ia->second == ib->second)) return false;
  }
  return true;
}

bool operator==(const RunLog& a, const RunLog& b) { return a.frames == b.frames; }

namespace {

void validate_key(const VariableKey& key) {
  if (key.name.empty()) throw DataIntegrityError("variable name is empty");
  for (char c : key.name) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      throw DataIntegrityError("variable name '" + key.name +
                               "' contains whitespace or a comma");
    }
  }
  if (key.unit.find_first_of(",\n\r") != std::string::npos) {
    throw DataIntegrityError("unit of '" + key.name + "' contains a comma or newline");
  }
}

}  // namespace

Datastore::Datastore(double step_size_s) : step_size_s_(step_size_s) {
  if (!(step_size_s > 0.0) || !std::isfinite(step_size_s)) {
    throw DataIntegrityError("step size must be positive");
  }
}

void Datastore::register_key(const VariableKey& key) {
  validate_key(key);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = registry_.emplace(key, key.unit);
  if (!inserted && it->second != key.unit) {
    throw DataIntegrityError("key " + format_key(key) + " already registered with unit '" +
                             it->second + "'");
  }
}

std::vector<VariableKey> Datastore::keys() const {
  std::shared_lock lock(mutex_);
  std::vector<VariableKey> out;
  out.reserve(registry_.size());
  for (const auto& [key, unit] : registry_) {
    out.push_back(VariableKey{key.name, key.source, unit});
  }
  return out;
}

void Datastore::upsert_sample(const VariableKey& key, const Sample& sample) {
  if (!std::isfinite(sample.value)) {
    throw DataIntegrityError("non-finite value for " + format_key(key) + " at step " +
                             std::to_string(sample.step_index));
  }
  if (sample.step_index < 0) throw DataIntegrityError("negative step index");
  const double expected_t = static_cast<double>(sample.step_index) * step_size_s_;
  if (std::abs(sample.sim_time_s - expected_t) > 1e-9 * std::max(1.0, std::abs(expected_t))) {
    throw DataIntegrityError("sim_time_s does not match step_index x step_size_s for " +
                             format_key(key));
  }
  register_key(key);
  std::unique_lock lock(mutex_);
  const auto sealed = static_cast<std::int64_t>(sealed_.size()) - 1;
  if (sample.step_index <= sealed) {
    throw OutOfOrderError("step " + std::to_string(sample.step_index) +
                          " already sealed (last sealed " + std::to_string(sealed) + ")");
  }
  auto& frame = open_[sample.step_index];
  frame.step_index = sample.step_index;
  VariableKey stored{key.name, key.source, registry_.at(key)};
  frame.entries.insert_or_assign(std::move(stored), sample);
}

void Datastore::upsert(const VariableKey& key, std::int64_t step, double value,
                       std::optional<double> wall_time_ms) {
  upsert_sample(key, Sample{step, static_cast<double>(step) * step_size_s_, value, wall_time_ms});
}

void Datastore::seal(std::int64_t step) {
  std::unique_lock lock(mutex_);
  const auto next = static_cast<std::int64_t>(sealed_.size());
  if (step != next) {
    throw OutOfOrderError("cannot seal step " + std::to_string(step) + "; next sealable step is " +
                          std::to_string(next));
  }
  Frame frame;
  frame.step_index = step;
  if (auto it = open_.find(step); it != open_.end()) {
    frame = std::move(it->second);
    open_.erase(it);
  }
  sealed_.push_back(std::make_shared<const Frame>(std::move(frame)));
}

std::int64_t Datastore::last_sealed() const {
  std::shared_lock lock(mutex_);
  return static_cast<std::int64_t>(sealed_.size()) - 1;
}

std::shared_ptr<const Frame> Datastore::fetch_frame(std::int64_t step) const {
  std::shared_lock lock(mutex_);
  if (step < 0 || step >= static_cast<std::int64_t>(sealed_.size())) return nullptr;
  return sealed_[static_cast<std::size_t>(step)];
}

SeriesQuery Datastore::query_series(const VariableKey& key, std::int64_t first,
                                    std::int64_t last) const {
  std::shared_lock lock(mutex_);
  if (!registry_.contains(key)) throw UnknownKeyError("unknown key " + format_key(key));
  SeriesQuery out;
  if (last < first) return out;
  const auto sealed = static_cast<std::int64_t>(sealed_.size()) - 1;
  if (first < 0 || last > sealed) {
    throw NotAvailableError("range [" + std::to_string(first) + ", " + std::to_string(last) +
                            "] exceeds sealed steps");
  }
  for (auto s = first; s <= last; ++s) {
    if (const Sample* sample = sealed_[static_cast<std::size_t>(s)]->find(key)) {
      out.samples.push_back(*sample);
    } else {
      out.gaps.push_back(s);
    }
  }
  return out;
}

RunLog Datastore::snapshot(RunMetadata metadata) const {
  std::shared_lock lock(mutex_);
  RunLog log;
  metadata.step_size_s = step_size_s_;
  log.metadata = std::move(metadata);
  log.frames.reserve(sealed_.size());
  for (const auto& f : sealed_) log.frames.push_back(*f);
  return log;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

void write_csv(std::ostream& os, const RunLog& log, std::size_t& rows) {
  os << kCsvHeader << '\n';
  for (const auto& frame : log.frames) {
    for (const auto& [key, s] : frame.entries) {
      os << s.step_index << ',' << format_double(s.sim_time_s) << ',' << key.name << ','
         << to_string(key.source) << ',' << key.unit << ',' << format_double(s.value) << ',';
      if (s.wall_time_ms) os << format_double(*s.wall_time_ms);
      os << '\n';
      ++rows;
    }
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view field, std::size_t row, const char* column) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("row " + std::to_string(row) + ": invalid " + column + " '" +
                     std::string(field) + "'", row);
  }
  return v;
}

}  // namespace

std::string export_to_string(const RunLog& log) {
  std::ostringstream os;
  std::size_t rows = 0;
  write_csv(os, log, rows);
  return os.str();
}

ExportSummary export_run(const RunLog& log, const std::filesystem::path& destination) {
  namespace fs = std::filesystem;
  const fs::path tmp = destination.string() + ".partial";
  ExportSummary summary;
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    write_csv(os, log, summary.rows);
    os.flush();
    if (!os) {
      os.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, destination, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move export into place at " + destination.string());
  }
  summary.files.push_back(destination);
  return summary;
}

RunLog import_from_string(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw ParseError("row 1: missing or malformed header", 1);
  }
  RunLog log;
  std::map<std::int64_t, Frame> frames;
  std::optional<double> step_size;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) {
      throw ParseError("row " + std::to_string(row) + ": expected 7 fields, got " +
                       std::to_string(f.size()), row);
    }
    std::int64_t step = 0;
    {
      auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), step);
      if (ec != std::errc() || ptr != f[0].data() + f[0].size() || step < 0) {
        throw ParseError("row " + std::to_string(row) + ": invalid step_index", row);
      }
    }
    Sample s;
    s.step_index = step;
    s.sim_time_s = parse_double(f[1], row, "sim_time_s");
    s.value = parse_double(f[5], row, "value");
    if (!std::isfinite(s.value)) {
      throw ParseError("row " + std::to_string(row) + ": non-finite value", row);
    }
    if (!f[6].empty()) s.wall_time_ms = parse_double(f[6], row, "wall_time_ms");
    auto source = parse_source(f[3]);
    if (!source) {
      throw ParseError("row " + std::to_string(row) + ": unknown source '" + std::string(f[3]) +
                       "'", row);
    }
    if (f[2].empty()) throw ParseError("row " + std::to_string(row) + ": empty variable", row);
    VariableKey key{std::string(f[2]), *source, std::string(f[4])};
    if (step > 0 && !step_size) step_size = s.sim_time_s / static_cast<double>(step);
    auto& frame = frames[step];
    frame.step_index = step;
    if (!frame.entries.emplace(std::move(key), s).second) {
      throw ParseError("row " + std::to_string(row) + ": duplicate (variable, source, step)", row);
    }
  }
  if (step_size) log.metadata.step_size_s = *step_size;
  if (!frames.empty()) {
    const auto last = frames.rbegin()->first;
    log.frames.reserve(static_cast<std::size_t>(last + 1));
    for (std::int64_t s = 0; s <= last; ++s) {
      auto it = frames.find(s);
      if (it == frames.end()) {
        Frame empty;
        empty.step_index = s;
        log.frames.push_back(std::move(empty));
      } else {
        log.frames.push_back(std::move(it->second));
      }
    }
  }
  return log;
}

RunLog import_run(const std::filesystem::path& source) {
  std::ifstream is(source, std::ios::binary);
  if (!is) throw IoError("cannot open " + source.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return import_from_string(buf.str());
}

}  // namespace hilft
