#include "wsn/weather.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <thread>

#include "wsn/csv.hpp"
#include "wsn/error.hpp"
#include "wsn/json_io.hpp"
#include "wsn/time_util.hpp"

namespace wsn::weather {

FixtureSet FixtureSet::load(const std::filesystem::path& dir) {
  FixtureSet set;
  if (!std::filesystem::is_directory(dir)) {
    throw ValidationError("weather fixtures directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const CsvFile csv = read_csv(path, {"timestamp", "value"});
    std::vector<std::pair<std::int64_t, double>> rows;
    rows.reserve(csv.rows.size());
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      const std::int64_t ts = parse_iso8601_utc(csv.rows[i][0]);
      double v;
      try {
        v = std::stod(csv.rows[i][1]);
      } catch (const std::exception&) {
        throw ValidationError(path.string() + " row " + std::to_string(i + 2) +
                              ": bad value '" + csv.rows[i][1] + "'");
      }
      if (!std::isfinite(v)) {
        throw ValidationError(path.string() + ": non-finite fixture value");
      }
      if (!rows.empty() && ts <= rows.back().first) {
        throw ValidationError(path.string() + ": timestamps must be strictly "
                              "increasing (row " + std::to_string(i + 2) + ")");
      }
      rows.emplace_back(ts, v);
    }
    if (rows.empty()) {
      throw ValidationError(path.string() + ": fixture has no rows");
    }
    set.rows_[path.stem().string()] = std::move(rows);
  }
  if (set.rows_.empty()) {
    throw ValidationError("no .csv fixtures in " + dir.string());
  }
  return set;
}

bool FixtureSet::has_location(const std::string& location) const {
  return rows_.contains(location);
}

WeatherReading FixtureSet::current(const std::string& location,
                                   std::int64_t at) const {
  const auto it = rows_.find(location);
  if (it == rows_.end()) {
    throw NotFoundError("unknown weather location: " + location);
  }
  const auto& rows = it->second;
  auto upper = std::upper_bound(
      rows.begin(), rows.end(), at,
      [](std::int64_t t, const auto& row) { return t < row.first; });
  if (upper == rows.begin()) {
    throw NotFoundError("no fixture data at or before " +
                        format_iso8601_utc(at) + " for " + location);
  }
  --upper;
  WeatherReading reading;
  reading.location_id = location;
  reading.wallclock = upper->first;
  reading.temperature = upper->second;
  reading.source = "stub";
  return reading;
}

WeatherForecastSeries FixtureSet::forecast(const std::string& location,
                                           int hours, std::int64_t at) const {
  if (hours < 1) throw ValidationError("forecast horizon must be >= 1 hour");
  const auto it = rows_.find(location);
  if (it == rows_.end()) {
    throw NotFoundError("unknown weather location: " + location);
  }
  WeatherForecastSeries out;
  out.location_id = location;
  out.horizon_hours = hours;
  const std::int64_t end = at + static_cast<std::int64_t>(hours) * 3600;
  for (const auto& [ts, v] : it->second) {
    if (ts > at && ts <= end) out.values.emplace_back(ts, v);
  }
  if (out.values.empty()) {
    throw NotFoundError("no fixture data in (" + format_iso8601_utc(at) +
                        ", +" + std::to_string(hours) + "h] for " + location);
  }
  return out;
}

struct StubWeatherServer::Impl {
  FixtureSet fixtures;
  httplib::Server server;
  std::thread thread;
};

namespace {

std::int64_t require_at_param(const httplib::Request& req) {
  if (!req.has_param("at")) {
    throw ValidationError("missing 'at' (epoch seconds of simulated time)");
  }
  return std::stoll(req.get_param_value("at"));
}

void write_error(httplib::Response& res, int status, const std::string& what) {
  Json j;
  j["error"] = what;
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

}  // namespace

StubWeatherServer::StubWeatherServer(FixtureSet fixtures, int port)
    : impl_(std::make_unique<Impl>()) {
  impl_->fixtures = std::move(fixtures);

  impl_->server.Get("/current", [this](const httplib::Request& req,
                                       httplib::Response& res) {
    try {
      const std::string location = req.get_param_value("location");
      const WeatherReading r =
          impl_->fixtures.current(location, require_at_param(req));
      Json j;
      j["location_id"] = r.location_id;
      j["wallclock"] = format_iso8601_utc(r.wallclock);
      j["temperature"] = r.temperature;
      j["source"] = r.source;
      res.set_content(j.dump(), "application/json");
    } catch (const NotFoundError& e) {
      write_error(res, 404, e.what());
    } catch (const std::exception& e) {
      write_error(res, 400, e.what());
    }
  });

  impl_->server.Get("/forecast", [this](const httplib::Request& req,
                                        httplib::Response& res) {
    try {
      const std::string location = req.get_param_value("location");
      const int hours = req.has_param("hours")
                            ? std::stoi(req.get_param_value("hours"))
                            : 0;
      const WeatherForecastSeries f =
          impl_->fixtures.forecast(location, hours, require_at_param(req));
      Json j;
      j["location_id"] = f.location_id;
      j["horizon_hours"] = f.horizon_hours;
      Json values = Json::array();
      for (const auto& [ts, v] : f.values) {
        values.push_back(Json{{"wallclock", format_iso8601_utc(ts)},
                              {"temperature", v}});
      }
      j["values"] = std::move(values);
      res.set_content(j.dump(), "application/json");
    } catch (const NotFoundError& e) {
      write_error(res, 404, e.what());
    } catch (const std::exception& e) {
      write_error(res, 400, e.what());
    }
  });

  if (port == 0) {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
  } else {
    if (!impl_->server.bind_to_port("127.0.0.1", port)) {
      throw TransportError("weather stub: cannot bind port " +
                           std::to_string(port));
    }
    port_ = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubWeatherServer::~StubWeatherServer() { stop(); }

std::string StubWeatherServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

void StubWeatherServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

WeatherClient::WeatherClient(std::string base_url)
    : base_url_(std::move(base_url)) {}

namespace {

Json get_json(const std::string& base_url, const std::string& path) {
  httplib::Client cli(base_url);
  cli.set_connection_timeout(2, 0);
  cli.set_read_timeout(5, 0);
  const httplib::Result res = cli.Get(path);
  if (!res) {
    throw TransportError("weather service unreachable at " + base_url + path);
  }
  if (res->status == 404) {
    throw NotFoundError("weather service: " + res->body);
  }
  if (res->status != 200) {
    throw TransportError("weather service returned status " +
                         std::to_string(res->status) + ": " + res->body);
  }
  return parse_json(res->body, "weather response");
}

}  // namespace

WeatherReading WeatherClient::fetch_current(const std::string& location,
                                            std::int64_t at) const {
  const Json j = get_json(base_url_, "/current?location=" + location +
                                         "&at=" + std::to_string(at));
  WeatherReading r;
  r.location_id = j.value("location_id", location);
  r.wallclock = parse_iso8601_utc(j.at("wallclock").get<std::string>());
  r.temperature = j.at("temperature").get<double>();
  r.source = j.value("source", std::string{"live"});
  if (!std::isfinite(r.temperature)) {
    throw ValidationError("weather service returned non-finite temperature");
  }
  return r;
}

WeatherForecastSeries WeatherClient::fetch_forecast(const std::string& location,
                                                    int horizon_hours,
                                                    std::int64_t at) const {
  if (horizon_hours < 1) {
    throw ValidationError("fetch_forecast: horizon must be >= 1 hour");
  }
  const Json j = get_json(
      base_url_, "/forecast?location=" + location +
                     "&hours=" + std::to_string(horizon_hours) +
                     "&at=" + std::to_string(at));
  WeatherForecastSeries f;
  f.location_id = j.value("location_id", location);
  f.horizon_hours = j.value("horizon_hours", horizon_hours);
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (const auto& row : j.at("values")) {
    const std::int64_t ts =
        parse_iso8601_utc(row.at("wallclock").get<std::string>());
    const double v = row.at("temperature").get<double>();
    if (!std::isfinite(v)) {
      throw ValidationError("weather service returned non-finite temperature");
    }
    if (ts <= prev) {
      throw ValidationError("weather forecast timestamps must increase");
    }
    prev = ts;
    f.values.emplace_back(ts, v);
  }
  return f;
}

}  // namespace wsn::weather
