#include "pushsum/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pushsum/config.hpp"
#include "pushsum/oracle.hpp"

namespace pushsum::cli {

namespace {

// Writes through a temporary file so a failed write leaves nothing behind.
bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out || !(out << content) || !out.flush()) {
      err << "error: cannot write '" << path << "'\n";
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      return false;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    err << "error: cannot write '" << path << "': " << ec.message() << "\n";
    std::filesystem::remove(tmp, ec);
    return false;
  }
  return true;
}

std::string csv_of(const RunResult& result) {
  std::ostringstream csv;
  write_csv(csv, result);
  return csv.str();
}

std::string sweep_key(const std::string& param) {
  if (param == "failure_probability") return "schedule.failure_probability";
  if (param == "T") return "schedule.T";
  if (param == "seed") return "schedule.seed";
  if (param == "n") return "graph.nodes";
  return {};
}

struct SweepOutcome {
  std::string status = "ok";
  std::optional<long long> converged_at;
  double final_spread = 0.0;
  std::string message;
};

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::vector<std::string>& overrides, Io io, const RunHooks& hooks) {
  ScenarioConfig cfg;
  try {
    cfg = load_config_file(config_path, overrides);
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  RunResult result;
  try {
    result = run_scenario(cfg, hooks);
  } catch (const AuditFailure& e) {
    io.err << e.what() << "\n";
    return kExitAudit;
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const std::string summary = summary_record(result);
  if (!write_file(out_path, csv_of(result), io.err) ||
      !write_file(out_path + ".summary.json", summary + "\n", io.err)) {
    return kExitConfig;
  }
  io.out << summary << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::vector<std::string>& overrides, Io io,
               const VerifyOptions& options) {
  VerificationReport report;
  try {
    report = verify_scenario(load_config_file(config_path, overrides), options);
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  io.out << report.text();
  if (!report.passed()) {
    for (const auto& c : report.checks) {
      if (!c.passed) {
        io.err << "verification failed: " << c.name << " at iteration " << *c.first_failure << "\n";
        break;
      }
    }
    return kExitAudit;
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values, const std::string& out_dir,
              const std::vector<std::string>& overrides, Io io) {
  const std::string key = sweep_key(param);
  if (key.empty()) {
    io.err << "sweep error: unknown parameter '" << param
           << "' (expected failure_probability, T, seed or n)\n";
    return kExitConfig;
  }
  if (values.empty()) {
    io.err << "sweep error: empty value list\n";
    return kExitConfig;
  }
  try {
    const auto doc = load_document(config_path, overrides);
    if (param == "n" && !(doc.contains("graph") && doc["graph"].contains("family") &&
                          doc.contains("x0") && doc["x0"].is_string())) {
      io.err << "sweep error: sweeping n needs a graph family and a generated x0\n";
      return kExitConfig;
    }
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    io.err << "sweep error: cannot create '" << out_dir << "': " << ec.message() << "\n";
    return kExitConfig;
  }

  std::vector<SweepOutcome> outcomes(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepOutcome& o = outcomes[i];
      std::vector<std::string> run_overrides = overrides;
      run_overrides.push_back(key + "=" + values[i]);
      try {
        const ScenarioConfig cfg = load_config_file(config_path, run_overrides);
        const RunResult result = run_scenario(cfg);
        o.converged_at = result.converged_at;
        o.final_spread = spread(result.final_z);
        std::ostringstream err;
        if (!write_file(out_dir + "/" + param + "_" + values[i] + ".csv", csv_of(result), err)) {
          o.status = "write_error";
          o.message = err.str();
        }
      } catch (const ConfigError& e) {
        o.status = "config_error";
        o.message = e.what();
      } catch (const AuditFailure& e) {
        o.status = "audit_failure";
        o.message = e.what();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(values.size(), std::max(1u, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::ostringstream summary;
  summary << "value,status,converged_at,final_spread\n";
  bool failed = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& o = outcomes[i];
    summary << values[i] << ',' << o.status << ',';
    if (o.converged_at) summary << *o.converged_at;
    summary << ',';
    if (o.status == "ok") summary << o.final_spread;
    summary << '\n';
    if (o.status != "ok") {
      failed = true;
      io.err << param << "=" << values[i] << ": " << o.message << "\n";
    }
  }
  if (!write_file(out_dir + "/summary.csv", summary.str(), io.err)) return kExitConfig;
  io.out << summary.str();
  return failed ? kExitAudit : kExitOk;
}

ScenarioConfig demo_config(const std::string& name) {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::robust;
  cfg.graph = DirectedGraph::ring_with_chord(5);
  cfg.x0 = {1, 2, 3, 4, 5};
  if (name == "reliable") {
    cfg.iterations = 200;
    return cfg;
  }
  if (name == "lossy") {
    // Blocks of 10 leave room for failures while every link still delivers
    // once per block.
    cfg.schedule.kind = ScheduleKind::constant;
    cfg.schedule.block_length = 10;
    cfg.schedule.wake_probability = 0.5;
    cfg.schedule.failure_probability = 0.5;
    cfg.schedule.seed = 7;
    cfg.iterations = 20000;
    return cfg;
  }
  if (name == "diverging") {
    cfg.protocol = Protocol::ordinary;
    cfg.graph = DirectedGraph::complete(3).with_self_loops();
    cfg.x0 = {0, 0.5, 1};
    cfg.schedule.kind = ScheduleKind::geometric;
    cfg.schedule.regime = Regime::Kind::ordinary;
    cfg.schedule.block_length = 4;
    cfg.schedule.growth = 2;
    cfg.iterations = 100000;
    return cfg;
  }
  throw ConfigError("demo: unknown name '" + name + "' (expected reliable, lossy or diverging)");
}

int cmd_demo(const std::string& name, const std::string& out_path, Io io) {
  RunResult result;
  try {
    const ScenarioConfig cfg = demo_config(name);
    result = name == "diverging" ? divergence_demo(cfg) : run_scenario(cfg);
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AuditFailure& e) {
    io.err << e.what() << "\n";
    return kExitAudit;
  }
  if (!write_file(out_path, csv_of(result), io.err)) return kExitConfig;
  io.out << summary_record(result) << "\n";
  return kExitOk;
}

}  // namespace pushsum::cli
