#pragma once

#include "gchp/cli/config.hpp"

#include <ostream>
#include <span>
#include <string>

namespace gchp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitFit = 3;

// Each command reads its inputs, writes under config.out and returns an exit
// code. Progress goes to `log`. Outputs are byte-identical for a fixed config.
//
//   ingest    raw book files  -> events/session_<id>.csv, ingest_report.json
//   diagnose  event files     -> diagnose/session_<id>_*.csv, diagnose/report.json
//   fit       event files     -> fit/session_<id>.json, fit/session_<id>_curves.csv, fit/summary.csv
//   backtest  event files     -> backtest/session_<id>*.{json,csv}, backtest/summary*.{json,csv}
//   simulate  generator       -> lob/day_<d>.csv, simulated/session_<d>.csv, simulated/truth.json
int cmd_ingest(const RunConfig& config, std::ostream& log);
int cmd_diagnose(const RunConfig& config, std::ostream& log);
int cmd_fit(const RunConfig& config, std::ostream& log);
int cmd_backtest(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);

// Full command line, argv[0] excluded. Errors are reported on `err` and
// mapped to the exit codes above.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace gchp::cli
