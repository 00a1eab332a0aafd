#include "wsn/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "wsn/csv.hpp"
#include "wsn/error.hpp"
#include "wsn/time_util.hpp"

namespace wsn::sim {

namespace {

Json node_to_json(const NodeReport& n) {
  Json j;
  j["sensor_id"] = n.sensor_id;
  j["samples_taken"] = n.samples_taken;
  j["transmissions"] = n.transmissions;
  j["suppressions"] = n.suppressions;
  j["receptions"] = n.receptions;
  j["model_updates_applied"] = n.model_updates_applied;
  j["energy_spent_joules"] = n.energy_spent_joules;
  j["final_battery_joules"] = n.final_battery_joules;
  j["max_reconstruction_error"] = n.max_reconstruction_error;
  j["halted"] = n.halted;
  j["energy_costs"] = Json{{"battery_joules", n.energy_costs.battery_joules},
                           {"cost_sample_joules", n.energy_costs.cost_sample_joules},
                           {"cost_tx_joules", n.energy_costs.cost_tx_joules},
                           {"cost_rx_joules", n.energy_costs.cost_rx_joules}};
  return j;
}

NodeReport node_from_json(const Json& j) {
  NodeReport n;
  n.sensor_id = j.at("sensor_id").get<std::string>();
  n.samples_taken = j.at("samples_taken").get<std::int64_t>();
  n.transmissions = j.at("transmissions").get<std::int64_t>();
  n.suppressions = j.at("suppressions").get<std::int64_t>();
  n.receptions = j.at("receptions").get<std::int64_t>();
  n.model_updates_applied = j.at("model_updates_applied").get<std::int64_t>();
  n.energy_spent_joules = j.at("energy_spent_joules").get<double>();
  n.final_battery_joules = j.at("final_battery_joules").get<double>();
  n.max_reconstruction_error = j.at("max_reconstruction_error").get<double>();
  n.halted = j.at("halted").get<bool>();
  const Json& e = j.at("energy_costs");
  n.energy_costs.battery_joules = e.at("battery_joules").get<double>();
  n.energy_costs.cost_sample_joules = e.at("cost_sample_joules").get<double>();
  n.energy_costs.cost_tx_joules = e.at("cost_tx_joules").get<double>();
  n.energy_costs.cost_rx_joules = e.at("cost_rx_joules").get<double>();
  return n;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << body;
}

}  // namespace

Json report_to_json(const SimReport& report) {
  Json j;
  j["scenario_name"] = report.scenario_name;
  j["seed"] = report.seed;
  j["duration_seconds"] = report.duration_seconds;
  Json nodes = Json::array();
  for (const auto& n : report.nodes) nodes.push_back(node_to_json(n));
  j["nodes"] = std::move(nodes);
  j["total_samples"] = report.total_samples;
  j["total_transmissions"] = report.total_transmissions;
  j["tx_reduction_ratio"] = report.tx_reduction_ratio;
  return j;
}

SimReport report_from_json(const Json& j) {
  SimReport r;
  r.scenario_name = j.at("scenario_name").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.duration_seconds = j.at("duration_seconds").get<std::int64_t>();
  for (const auto& nj : j.at("nodes")) r.nodes.push_back(node_from_json(nj));
  r.total_samples = j.at("total_samples").get<std::int64_t>();
  r.total_transmissions = j.at("total_transmissions").get<std::int64_t>();
  r.tx_reduction_ratio = j.at("tx_reduction_ratio").get<double>();
  return r;
}

void write_bundle(const std::filesystem::path& dir, const ReportBundle& bundle) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report_to_json(bundle.report).dump(2) + "\n");

  std::ostringstream tx;
  tx << "sensor_id,sample_tick,sim_time_s,wallclock,phase,transmitted,"
        "true_value,stored_value,abs_error\n";
  for (const auto& row : bundle.samples) {
    tx << row.sensor_id << ',' << row.sample_tick << ',' << row.sim_time_s
       << ',' << format_iso8601_utc(row.wallclock) << ',' << row.phase << ','
       << (row.transmitted ? 1 : 0) << ',' << format_double(row.true_value)
       << ',' << format_double(row.stored_value) << ','
       << format_double(row.abs_error) << '\n';
  }
  write_file(dir / "transmissions.csv", tx.str());

  std::ostringstream iv;
  iv << "sim_time_s,sensor_id,interval_seconds\n";
  for (const auto& row : bundle.intervals) {
    iv << row.sim_time_s << ',' << row.sensor_id << ',' << row.interval_seconds
       << '\n';
  }
  write_file(dir / "intervals.csv", iv.str());

  std::ostringstream cmd;
  cmd << "sim_time_s,command_id,sensor_id,kind,detail\n";
  for (const auto& row : bundle.commands) {
    cmd << row.sim_time_s << ',' << row.command_id << ',' << row.sensor_id
        << ',' << row.kind << ',' << row.detail << '\n';
  }
  write_file(dir / "commands.csv", cmd.str());
}

ReportBundle read_bundle(const std::filesystem::path& dir) {
  ReportBundle bundle;
  {
    std::ifstream in(dir / "report.json");
    if (!in) throw ValidationError("missing report.json in " + dir.string());
    std::stringstream buf;
    buf << in.rdbuf();
    bundle.report = report_from_json(parse_json(buf.str(), "report.json"));
  }
  const CsvFile tx = read_csv(dir / "transmissions.csv",
                              {"sensor_id", "sample_tick", "sim_time_s",
                               "wallclock", "phase", "transmitted",
                               "true_value", "stored_value", "abs_error"});
  for (std::size_t i = 0; i < tx.rows.size(); ++i) {
    const auto& r = tx.rows[i];
    SampleLogRow row;
    try {
      row.sensor_id = r[0];
      row.sample_tick = std::stoll(r[1]);
      row.sim_time_s = std::stoll(r[2]);
      row.wallclock = parse_iso8601_utc(r[3]);
      row.phase = r[4];
      row.transmitted = r[5] == "1";
      row.true_value = std::stod(r[6]);
      row.stored_value = std::stod(r[7]);
      row.abs_error = std::stod(r[8]);
    } catch (const std::exception& e) {
      throw ValidationError("transmissions.csv row " + std::to_string(i + 2) +
                            ": " + e.what());
    }
    bundle.samples.push_back(std::move(row));
  }
  const CsvFile iv =
      read_csv(dir / "intervals.csv", {"sim_time_s", "sensor_id", "interval_seconds"});
  for (const auto& r : iv.rows) {
    bundle.intervals.push_back(
        IntervalLogRow{std::stoll(r[0]), r[1], std::stoll(r[2])});
  }
  const CsvFile cm = read_csv(
      dir / "commands.csv", {"sim_time_s", "command_id", "sensor_id", "kind", "detail"});
  for (const auto& r : cm.rows) {
    bundle.commands.push_back(
        CommandLogRow{std::stoll(r[0]), std::stoll(r[1]), r[2], r[3], r[4]});
  }
  return bundle;
}

SimReport summarize_from_logs(const ReportBundle& bundle) {
  SimReport out;
  out.scenario_name = bundle.report.scenario_name;
  out.seed = bundle.report.seed;
  out.duration_seconds = bundle.report.duration_seconds;

  std::map<std::string, NodeReport> nodes;
  for (const auto& n : bundle.report.nodes) {
    NodeReport fresh;
    fresh.sensor_id = n.sensor_id;
    fresh.energy_costs = n.energy_costs;
    fresh.halted = n.halted;
    nodes[n.sensor_id] = fresh;
  }
  for (const auto& row : bundle.samples) {
    auto& n = nodes[row.sensor_id];
    if (n.sensor_id.empty()) n.sensor_id = row.sensor_id;
    n.samples_taken += 1;
    if (row.transmitted) {
      n.transmissions += 1;
    } else {
      n.suppressions += 1;
    }
    n.max_reconstruction_error =
        std::max(n.max_reconstruction_error, row.abs_error);
  }
  for (const auto& row : bundle.commands) {
    auto& n = nodes[row.sensor_id];
    n.receptions += 1;
    if (row.kind == "model_update") n.model_updates_applied += 1;
  }
  for (auto& [_, n] : nodes) {
    n.energy_spent_joules =
        n.energy_costs.cost_sample_joules * static_cast<double>(n.samples_taken) +
        n.energy_costs.cost_tx_joules * static_cast<double>(n.transmissions) +
        n.energy_costs.cost_rx_joules * static_cast<double>(n.receptions);
    n.final_battery_joules =
        std::max(0.0, n.energy_costs.battery_joules - n.energy_spent_joules);
    out.total_samples += n.samples_taken;
    out.total_transmissions += n.transmissions;
    out.nodes.push_back(n);
  }
  out.tx_reduction_ratio =
      out.total_samples == 0
          ? 0.0
          : 1.0 - static_cast<double>(out.total_transmissions) /
                      static_cast<double>(out.total_samples);
  return out;
}

bool reports_equal(const SimReport& a, const SimReport& b, std::string* why) {
  const auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.nodes.size() != b.nodes.size()) return fail("node count differs");
  if (a.total_samples != b.total_samples) return fail("total_samples differs");
  if (a.total_transmissions != b.total_transmissions) {
    return fail("total_transmissions differs");
  }
  if (a.tx_reduction_ratio != b.tx_reduction_ratio) {
    return fail("tx_reduction_ratio differs");
  }
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const auto& x = a.nodes[i];
    const auto& y = b.nodes[i];
    if (x.sensor_id != y.sensor_id) return fail("node order differs");
    if (x.samples_taken != y.samples_taken ||
        x.transmissions != y.transmissions ||
        x.suppressions != y.suppressions || x.receptions != y.receptions ||
        x.model_updates_applied != y.model_updates_applied) {
      return fail("counters differ for " + x.sensor_id);
    }
    if (x.energy_spent_joules != y.energy_spent_joules) {
      return fail("energy differs for " + x.sensor_id);
    }
    if (x.max_reconstruction_error != y.max_reconstruction_error) {
      return fail("max_reconstruction_error differs for " + x.sensor_id);
    }
  }
  return true;
}

}  // namespace wsn::sim
