#include "wsn/store.hpp"

#include <cmath>
#include <fstream>

#include "wsn/error.hpp"
#include "wsn/json_io.hpp"
#include "wsn/time_util.hpp"

namespace wsn::dash {

namespace {

bool safe_sensor_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return id != "." && id != "..";
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw ValidationError("store: cannot open log file " + path.string());
  }
  out << line << '\n';
  out.flush();
}

}  // namespace

MeasurementStore::MeasurementStore(std::filesystem::path data_dir)
    : data_dir_(std::move(data_dir)) {
  std::filesystem::create_directories(data_dir_ / "measurements");
  load();
}

MeasurementStore::~MeasurementStore() = default;

std::filesystem::path MeasurementStore::sensor_log_path(
    const std::string& sensor_id) const {
  return data_dir_ / "measurements" / (sensor_id + ".ndjson");
}

void MeasurementStore::load() {
  const auto dir = data_dir_ / "measurements";
  std::vector<std::filesystem::path> logs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".ndjson") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json j = parse_json(line, "store log " + path.string());
      StoredMeasurement sm;
      sm.measurement = measurement_from_json(j);
      sm.seq = j.value("seq", std::int64_t{0});
      next_seq_ = std::max(next_seq_, sm.seq + 1);
      provenance_counts_[static_cast<int>(sm.measurement.provenance)] += 1;
      by_sensor_[sm.measurement.sensor_id][sm.measurement.tick] = std::move(sm);
    }
  }
  const auto failure_log = data_dir_ / "failures.ndjson";
  if (std::filesystem::exists(failure_log)) {
    std::ifstream in(failure_log);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json j = parse_json(line, "failure log");
      FailureRecord rec;
      rec.seq = j.value("seq", std::int64_t{0});
      rec.sensor_id = j.value("sensor_id", std::string{});
      rec.description = j.value("description", std::string{});
      rec.wallclock = parse_iso8601_utc(j.value("wallclock", std::string{"1970-01-01T00:00:00Z"}));
      next_seq_ = std::max(next_seq_, rec.seq + 1);
      failures_.push_back(std::move(rec));
    }
  }
}

MeasurementStore::AppendResult MeasurementStore::append(const Measurement& m) {
  if (!safe_sensor_id(m.sensor_id)) {
    throw ValidationError("store: invalid sensor_id '" + m.sensor_id + "'");
  }
  if (!std::isfinite(m.value)) {
    throw ValidationError("store: measurement value must be finite");
  }
  std::lock_guard lock(mutex_);
  auto& per_sensor = by_sensor_[m.sensor_id];
  if (per_sensor.contains(m.tick)) {
    return AppendResult{false, 0};
  }
  StoredMeasurement sm;
  sm.measurement = m;
  sm.seq = next_seq_++;

  Json j = to_json(m);
  j["seq"] = sm.seq;
  append_line(sensor_log_path(m.sensor_id), j.dump());

  provenance_counts_[static_cast<int>(m.provenance)] += 1;
  const std::int64_t seq = sm.seq;
  per_sensor[m.tick] = std::move(sm);
  return AppendResult{true, seq};
}

std::vector<StoredMeasurement> MeasurementStore::query(
    const std::string& sensor_id, std::int64_t from_tick,
    std::int64_t to_tick) const {
  std::lock_guard lock(mutex_);
  std::vector<StoredMeasurement> out;
  const auto it = by_sensor_.find(sensor_id);
  if (it == by_sensor_.end()) return out;
  for (auto iter = it->second.lower_bound(from_tick);
       iter != it->second.end() && iter->first <= to_tick; ++iter) {
    out.push_back(iter->second);
  }
  return out;
}

std::vector<StoredMeasurement> MeasurementStore::tail(
    const std::string& sensor_id, Provenance provenance,
    std::size_t count) const {
  std::lock_guard lock(mutex_);
  std::vector<StoredMeasurement> out;
  const auto it = by_sensor_.find(sensor_id);
  if (it == by_sensor_.end()) return out;
  for (auto iter = it->second.rbegin();
       iter != it->second.rend() && out.size() < count; ++iter) {
    if (iter->second.measurement.provenance == provenance) {
      out.push_back(iter->second);
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool MeasurementStore::has_tick(const std::string& sensor_id,
                                std::int64_t tick) const {
  std::lock_guard lock(mutex_);
  const auto it = by_sensor_.find(sensor_id);
  return it != by_sensor_.end() && it->second.contains(tick);
}

std::int64_t MeasurementStore::record_failure(const std::string& sensor_id,
                                              const std::string& description,
                                              std::int64_t wallclock) {
  std::lock_guard lock(mutex_);
  FailureRecord rec;
  rec.seq = next_seq_++;
  rec.sensor_id = sensor_id;
  rec.description = description;
  rec.wallclock = wallclock;

  Json j;
  j["seq"] = rec.seq;
  j["sensor_id"] = rec.sensor_id;
  j["description"] = rec.description;
  j["wallclock"] = format_iso8601_utc(rec.wallclock);
  append_line(data_dir_ / "failures.ndjson", j.dump());

  failures_.push_back(rec);
  return rec.seq;
}

std::vector<FailureRecord> MeasurementStore::failures(
    const std::string& sensor_id) const {
  std::lock_guard lock(mutex_);
  if (sensor_id.empty()) return failures_;
  std::vector<FailureRecord> out;
  for (const auto& f : failures_) {
    if (f.sensor_id == sensor_id) out.push_back(f);
  }
  return out;
}

std::int64_t MeasurementStore::total_measurements() const {
  std::lock_guard lock(mutex_);
  std::int64_t total = 0;
  for (const auto& [_, per_sensor] : by_sensor_) {
    total += static_cast<std::int64_t>(per_sensor.size());
  }
  return total;
}

std::int64_t MeasurementStore::count_by_provenance(Provenance p) const {
  std::lock_guard lock(mutex_);
  return provenance_counts_[static_cast<int>(p)];
}

std::int64_t MeasurementStore::next_seq() const {
  std::lock_guard lock(mutex_);
  return next_seq_;
}

}  // namespace wsn::dash
