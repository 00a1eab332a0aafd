#include "wsn/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "wsn/error.hpp"
#include "wsn/time_util.hpp"

namespace wsn::rules {

void ScheduleRule::validate() const {
  if (default_interval_seconds <= 0 || evaluation_period_seconds <= 0) {
    throw ValidationError("schedule rule: intervals must be positive");
  }
  std::vector<ScheduleSegment> sorted = segments;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScheduleSegment& a, const ScheduleSegment& b) {
              return a.start_second_of_day < b.start_second_of_day;
            });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& seg = sorted[i];
    if (seg.interval_seconds <= 0) {
      throw ValidationError("schedule rule: segment interval must be positive");
    }
    if (seg.start_second_of_day < 0 || seg.end_second_of_day > 86400 ||
        seg.start_second_of_day >= seg.end_second_of_day) {
      throw ValidationError("schedule rule: bad segment window");
    }
    if (i > 0 && sorted[i - 1].end_second_of_day > seg.start_second_of_day) {
      throw ValidationError("schedule rule: overlapping segment windows");
    }
  }
}

int evaluate_schedule(const ScheduleRule& rule, std::int64_t wallclock) {
  const int sod = seconds_of_day(wallclock);
  for (const auto& seg : rule.segments) {
    if (sod >= seg.start_second_of_day && sod < seg.end_second_of_day) {
      return seg.interval_seconds;
    }
  }
  return rule.default_interval_seconds;
}

void RelevancePolicy::validate() const {
  if (!(agreement_tolerance > 0.0)) {
    throw ValidationError("relevance policy: tolerance must be positive");
  }
  if (comparison_window_ticks <= 0 || evaluation_period_seconds <= 0) {
    throw ValidationError("relevance policy: window and period must be positive");
  }
  if (relaxed_interval_seconds <= eager_interval_seconds ||
      eager_interval_seconds <= 0) {
    throw ValidationError(
        "relevance policy: need relaxed_interval > eager_interval > 0");
  }
}

RelevanceVerdict assess_relevance(const Series& node_window,
                                  const Series& reference_window,
                                  const RelevancePolicy& policy) {
  if (node_window.empty() || reference_window.empty()) {
    throw AlignmentError("assess_relevance: empty comparison window");
  }
  const auto time_of = [](const Series& s, std::size_t i) {
    return s.start_tick + static_cast<std::int64_t>(i) * s.tick_seconds;
  };
  const std::int64_t node_first = time_of(node_window, 0);
  const std::int64_t node_last = time_of(node_window, node_window.size() - 1);
  const std::int64_t ref_first = time_of(reference_window, 0);
  const std::int64_t ref_last =
      time_of(reference_window, reference_window.size() - 1);
  if (node_last < ref_first || ref_last < node_first) {
    throw AlignmentError("assess_relevance: windows do not overlap in time");
  }

  double total = 0.0;
  std::size_t ref_idx = 0;
  for (std::size_t i = 0; i < node_window.size(); ++i) {
    const std::int64_t t = time_of(node_window, i);
    while (ref_idx + 1 < reference_window.size() &&
           std::llabs(time_of(reference_window, ref_idx + 1) - t) <=
               std::llabs(time_of(reference_window, ref_idx) - t)) {
      ++ref_idx;
    }
    total += std::abs(node_window.values[i] - reference_window.values[ref_idx]);
  }

  RelevanceVerdict verdict;
  verdict.window_ticks_compared = static_cast<std::int64_t>(node_window.size());
  verdict.mean_abs_deviation = total / static_cast<double>(node_window.size());
  verdict.agrees = verdict.mean_abs_deviation <= policy.agreement_tolerance;
  return verdict;
}

ReconfigCommand decide_reconfiguration(const RelevanceVerdict& verdict,
                                       const RelevancePolicy& policy) {
  ReconfigCommand cmd;
  if (verdict.agrees) {
    cmd.set_interval_seconds = policy.relaxed_interval_seconds;
    cmd.substitute_source = SubstituteSource::weather_forecast;
  } else {
    cmd.set_interval_seconds = policy.eager_interval_seconds;
    cmd.substitute_source = SubstituteSource::none;
  }
  return cmd;
}

std::optional<bool> HysteresisTracker::update(bool agrees) {
  if (committed_ && *committed_ == agrees) {
    candidate_.reset();
    streak_ = 0;
    return std::nullopt;
  }
  if (candidate_ && *candidate_ == agrees) {
    ++streak_;
  } else {
    candidate_ = agrees;
    streak_ = 1;
  }
  if (streak_ >= required_) {
    committed_ = agrees;
    candidate_.reset();
    streak_ = 0;
    return committed_;
  }
  return std::nullopt;
}

}  // namespace wsn::rules
