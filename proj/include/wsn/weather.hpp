#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace wsn::weather {

struct WeatherReading {
  std::string location_id;
  std::int64_t wallclock = 0;
  double temperature = 0.0;
  std::string source = "stub";
};

struct WeatherForecastSeries {
  std::string location_id;
  int horizon_hours = 0;
  std::vector<std::pair<std::int64_t, double>> values;  // (wallclock, temp)
};

// Per-location fixture rows loaded from `<location>.csv` files with header
// `timestamp,value`, strictly time-ordered.
class FixtureSet {
 public:
  static FixtureSet load(const std::filesystem::path& dir);

  bool has_location(const std::string& location) const;

  // Latest row at or before `at`; throws NotFoundError for unknown
  // locations or when `at` precedes the fixture span.
  WeatherReading current(const std::string& location, std::int64_t at) const;

  // Rows in (at, at + hours * 3600]; throws NotFoundError when the window
  // holds no fixture data.
  WeatherForecastSeries forecast(const std::string& location, int hours,
                                 std::int64_t at) const;

 private:
  std::map<std::string, std::vector<std::pair<std::int64_t, double>>> rows_;
};

// Bundled stand-in for the external weather service so desk runs need no
// network access. Responses are deterministic functions of
// (location, simulated time); the simulated clock travels in the `at`
// query parameter.
class StubWeatherServer {
 public:
  explicit StubWeatherServer(FixtureSet fixtures, int port = 0);
  ~StubWeatherServer();

  StubWeatherServer(const StubWeatherServer&) = delete;
  StubWeatherServer& operator=(const StubWeatherServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

// HTTP client for the weather interface. Never fabricates data: transport
// and lookup failures surface as TransportError / NotFoundError.
class WeatherClient {
 public:
  explicit WeatherClient(std::string base_url);

  WeatherReading fetch_current(const std::string& location,
                               std::int64_t at) const;
  WeatherForecastSeries fetch_forecast(const std::string& location,
                                       int horizon_hours,
                                       std::int64_t at) const;

 private:
  std::string base_url_;
};

}  // namespace wsn::weather
