#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wsn/commands.hpp"
#include "wsn/series.hpp"

namespace wsn::rules {

// One time-of-day window mapped to a sampling interval. Bounds are seconds
// since midnight UTC, [start, end).
struct ScheduleSegment {
  int start_second_of_day = 0;
  int end_second_of_day = 0;
  int interval_seconds = 0;
};

struct ScheduleRule {
  std::vector<ScheduleSegment> segments;
  int default_interval_seconds = 0;
  int evaluation_period_seconds = 0;

  void validate() const;  // non-overlapping windows, positive intervals
};

// Pure and total: the interval of the window containing the timestamp,
// otherwise the default.
int evaluate_schedule(const ScheduleRule& rule, std::int64_t wallclock);

struct RelevancePolicy {
  double agreement_tolerance = 1.0;
  int comparison_window_ticks = 12;
  std::int64_t relaxed_interval_seconds = 0;
  std::int64_t eager_interval_seconds = 0;
  int evaluation_period_seconds = 720;

  void validate() const;  // relaxed > eager, positive tolerance
};

struct RelevanceVerdict {
  bool agrees = false;
  double mean_abs_deviation = 0.0;
  std::int64_t window_ticks_compared = 0;
};

// Mean absolute deviation between a node window and an external reference.
// Both series are positioned in absolute seconds: sample i of a window
// lives at start_tick + i * tick_seconds. The reference is resampled to the
// node's sample times by nearest neighbor (weather services report coarser
// cadence than nodes). Throws AlignmentError when the windows do not
// overlap in time.
RelevanceVerdict assess_relevance(const Series& node_window,
                                  const Series& reference_window,
                                  const RelevancePolicy& policy);

// Agreement -> relax the interval and substitute the weather forecast;
// disagreement -> sample as often as configured and store sensor data only.
// The target sensor id is left for the caller to fill in.
ReconfigCommand decide_reconfiguration(const RelevanceVerdict& verdict,
                                       const RelevancePolicy& policy);

// Requires `required_consecutive` identical verdicts before committing to a
// new agreement state, so a single borderline window cannot flap the node
// configuration back and forth.
class HysteresisTracker {
 public:
  explicit HysteresisTracker(int required_consecutive = 2)
      : required_(required_consecutive) {}

  // Returns the newly committed state when this verdict changed it.
  std::optional<bool> update(bool agrees);

  std::optional<bool> committed() const { return committed_; }

 private:
  int required_;
  std::optional<bool> committed_;
  std::optional<bool> candidate_;
  int streak_ = 0;
};

}  // namespace wsn::rules
