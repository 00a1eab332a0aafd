#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wsn/measurement.hpp"

namespace wsn::dash {

struct StoredMeasurement {
  Measurement measurement;
  std::int64_t seq = 0;
};

struct FailureRecord {
  std::int64_t seq = 0;
  std::string sensor_id;
  std::string description;
  std::int64_t wallclock = 0;
};

// Append-only measurement store: newline-delimited JSON records in one log
// file per sensor plus an in-memory tick index. Nothing is ever mutated or
// deleted; restarting over the same directory rebuilds the identical index.
class MeasurementStore {
 public:
  explicit MeasurementStore(std::filesystem::path data_dir);
  ~MeasurementStore();

  MeasurementStore(const MeasurementStore&) = delete;
  MeasurementStore& operator=(const MeasurementStore&) = delete;

  struct AppendResult {
    bool stored = false;  // false: duplicate (sensor_id, tick), not stored
    std::int64_t seq = 0;
  };

  // Validates the measurement, assigns the next sequence number and appends
  // it to the sensor's log. Duplicate (sensor_id, tick) pairs are reported,
  // not stored twice. Throws ValidationError on malformed input.
  AppendResult append(const Measurement& m);

  // All stored measurements with from_tick <= tick <= to_tick, tick order.
  // Unknown sensors yield an empty result.
  std::vector<StoredMeasurement> query(const std::string& sensor_id,
                                       std::int64_t from_tick,
                                       std::int64_t to_tick) const;

  // Trailing `count` measurements of one provenance, tick order.
  std::vector<StoredMeasurement> tail(const std::string& sensor_id,
                                      Provenance provenance,
                                      std::size_t count) const;

  bool has_tick(const std::string& sensor_id, std::int64_t tick) const;

  std::int64_t record_failure(const std::string& sensor_id,
                              const std::string& description,
                              std::int64_t wallclock);
  std::vector<FailureRecord> failures(const std::string& sensor_id = "") const;

  std::int64_t total_measurements() const;
  std::int64_t count_by_provenance(Provenance p) const;
  std::int64_t next_seq() const;

 private:
  void load();
  std::filesystem::path sensor_log_path(const std::string& sensor_id) const;

  mutable std::mutex mutex_;
  std::filesystem::path data_dir_;
  std::int64_t next_seq_ = 1;
  std::map<std::string, std::map<std::int64_t, StoredMeasurement>> by_sensor_;
  std::vector<FailureRecord> failures_;
  std::int64_t provenance_counts_[3] = {0, 0, 0};
};

}  // namespace wsn::dash
