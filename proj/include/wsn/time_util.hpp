#pragma once

#include <cstdint>
#include <string>

namespace wsn {

// Timestamps are UTC epoch seconds throughout; ISO-8601 strings appear only
// at external boundaries (HTTP payloads, CSV files).

// Parses "YYYY-MM-DDTHH:MM:SSZ" (a trailing "+00:00" is accepted too).
// Throws ValidationError on anything else.
std::int64_t parse_iso8601_utc(const std::string& text);

// Formats epoch seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(std::int64_t epoch_seconds);

// Seconds since local midnight, for time-of-day schedule windows.
int seconds_of_day(std::int64_t epoch_seconds);

// Parses "HH:MM" or "HH:MM:SS" into seconds of day. "24:00" is allowed as an
// exclusive end-of-day bound.
int parse_time_of_day(const std::string& text);

}  // namespace wsn
