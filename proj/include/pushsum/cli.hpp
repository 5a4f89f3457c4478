#pragma once

// Subcommands behind the pushsum tool. Each returns the process exit code
// and writes diagnostics to `err`.

#include <iosfwd>
#include <string>
#include <vector>

#include "pushsum/harness.hpp"
#include "pushsum/verify.hpp"

namespace pushsum::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAudit = 2;

struct Io {
  std::ostream& out;
  std::ostream& err;
};

// Runs the scenario and writes the CSV to `out_path` and the summary record
// to `out_path + ".summary.json"`. 0 on success, 1 on a config error (no
// files written), 2 on an audit failure (no CSV written).
int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::vector<std::string>& overrides, Io io, const RunHooks& hooks = {});

// Runs the oracle checks and prints one line per check. 0 when all pass,
// 1 on a config error, 2 on any failed check.
int cmd_verify(const std::string& config_path, const std::vector<std::string>& overrides, Io io,
               const VerifyOptions& options = {});

// Sweepable parameters and the config key each one overrides.
inline constexpr const char* kSweepParams[] = {"failure_probability", "T", "seed", "n"};

// One run per value, written to `<out_dir>/<param>_<value>.csv`, plus
// `<out_dir>/summary.csv` with columns value,status,converged_at,final_spread.
// A run that fails is recorded and the sweep continues; the exit code is 1
// for an invalid sweep (unknown parameter, empty value list, unreadable
// config) and 2 if any run failed.
int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values, const std::string& out_dir,
              const std::vector<std::string>& overrides, Io io);

// Built-in scenarios: reliable, lossy and diverging.
ScenarioConfig demo_config(const std::string& name);
// Runs a built-in scenario and writes its CSV to `out_path`. The diverging
// demo runs divergence_demo over geometrically growing blocks.
int cmd_demo(const std::string& name, const std::string& out_path, Io io);

}  // namespace pushsum::cli
