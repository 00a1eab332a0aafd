#include "wsn/time_util.hpp"

#include <cstdio>

#include "wsn/error.hpp"

namespace wsn {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

bool in_range(int v, int lo, int hi) { return v >= lo && v <= hi; }

}  // namespace

std::int64_t parse_iso8601_utc(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int consumed = 0;
  const int n = std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y,
                            &mo, &d, &sep, &h, &mi, &s, &consumed);
  if (n != 7 || (sep != 'T' && sep != ' ')) {
    throw ValidationError("bad ISO-8601 timestamp: " + text);
  }
  const std::string tail = text.substr(static_cast<size_t>(consumed));
  if (tail != "Z" && tail != "+00:00" && !tail.empty() && tail != "z") {
    throw ValidationError("timestamp must be UTC ('Z'): " + text);
  }
  if (!in_range(mo, 1, 12) || !in_range(d, 1, 31) || !in_range(h, 0, 23) ||
      !in_range(mi, 0, 59) || !in_range(s, 0, 60)) {
    throw ValidationError("timestamp field out of range: " + text);
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

int seconds_of_day(std::int64_t epoch_seconds) {
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) rem += 86400;
  return static_cast<int>(rem);
}

int parse_time_of_day(const std::string& text) {
  int h = 0, mi = 0, s = 0;
  const int n = std::sscanf(text.c_str(), "%d:%d:%d", &h, &mi, &s);
  if (n < 2 || h < 0 || h > 24 || mi < 0 || mi > 59 || s < 0 || s > 59) {
    throw ValidationError("bad time of day: " + text);
  }
  const int total = h * 3600 + mi * 60 + s;
  if (total > 86400) throw ValidationError("time of day past 24:00: " + text);
  return total;
}

}  // namespace wsn
