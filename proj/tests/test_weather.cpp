#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "wsn/error.hpp"
#include "wsn/time_util.hpp"
#include "wsn/weather.hpp"

using namespace wsn::weather;

namespace {

std::filesystem::path make_fixtures() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("wsn_weather_test_" +
                    std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "plaza.csv", std::ios::trunc);
  out << "timestamp,value\n";
  for (int i = 0; i <= 24; ++i) {
    const std::int64_t ts =
        wsn::parse_iso8601_utc("2026-06-01T00:00:00Z") + i * 600;
    out << wsn::format_iso8601_utc(ts) << ',' << (18.0 + 0.1 * i) << '\n';
  }
  return dir;
}

const std::int64_t kStart = wsn::parse_iso8601_utc("2026-06-01T00:00:00Z");

}  // namespace

TEST_CASE("stub current echoes the fixture value at the simulated time") {
  const auto dir = make_fixtures();
  StubWeatherServer stub(FixtureSet::load(dir));
  WeatherClient client(stub.base_url());

  const WeatherReading at0 = client.fetch_current("plaza", kStart);
  CHECK(at0.temperature == 18.0);
  CHECK(at0.source == "stub");

  // 25 minutes in: the 20-minute row is the latest at or before.
  const WeatherReading later = client.fetch_current("plaza", kStart + 1500);
  CHECK(later.temperature == doctest::Approx(18.2));
  CHECK(later.wallclock == kStart + 1200);
  stub.stop();
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown locations are not-found errors") {
  const auto dir = make_fixtures();
  StubWeatherServer stub(FixtureSet::load(dir));
  WeatherClient client(stub.base_url());
  CHECK_THROWS_AS(client.fetch_current("atlantis", kStart), wsn::NotFoundError);
  CHECK_THROWS_AS(client.fetch_forecast("atlantis", 2, kStart),
                  wsn::NotFoundError);
  stub.stop();
  std::filesystem::remove_all(dir);
}

TEST_CASE("forecast returns at least one value per hour of horizon") {
  const auto dir = make_fixtures();
  StubWeatherServer stub(FixtureSet::load(dir));
  WeatherClient client(stub.base_url());
  const WeatherForecastSeries f = client.fetch_forecast("plaza", 3, kStart);
  CHECK(f.horizon_hours == 3);
  CHECK(f.values.size() >= 3);
  std::int64_t prev = 0;
  for (const auto& [ts, v] : f.values) {
    CHECK(ts > kStart);
    CHECK(ts <= kStart + 3 * 3600);
    CHECK(ts > prev);
    prev = ts;
    CHECK(std::isfinite(v));
  }
  stub.stop();
  std::filesystem::remove_all(dir);
}

TEST_CASE("zero horizon is rejected before any request is made") {
  WeatherClient client("http://127.0.0.1:9");
  CHECK_THROWS_AS(client.fetch_forecast("plaza", 0, kStart),
                  wsn::ValidationError);
}

TEST_CASE("an unreachable service is a transport error, never a default value") {
  WeatherClient client("http://127.0.0.1:9");  // discard port, nothing there
  CHECK_THROWS_AS(client.fetch_current("plaza", kStart), wsn::TransportError);
}

TEST_CASE("stub responses are deterministic functions of location and time") {
  const auto dir = make_fixtures();
  StubWeatherServer stub(FixtureSet::load(dir));
  WeatherClient client(stub.base_url());
  const auto a = client.fetch_forecast("plaza", 2, kStart + 300);
  const auto b = client.fetch_forecast("plaza", 2, kStart + 300);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i] == b.values[i]);
  }
  stub.stop();
  std::filesystem::remove_all(dir);
}

TEST_CASE("fixture validation rejects unordered timestamps") {
  const auto dir = std::filesystem::temp_directory_path() / "wsn_weather_bad";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "x.csv", std::ios::trunc);
    out << "timestamp,value\n"
        << "2026-06-01T01:00:00Z,1.0\n"
        << "2026-06-01T00:00:00Z,2.0\n";
  }
  CHECK_THROWS_AS(FixtureSet::load(dir), wsn::ValidationError);
  std::filesystem::remove_all(dir);
}
