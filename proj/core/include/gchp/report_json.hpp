#pragma once

#include "gchp/calibration.hpp"
#include "gchp/io.hpp"
#include "gchp/predict.hpp"

#include <string>

namespace gchp {

// Pretty-printed JSON documents; the provenance block is always present.
[[nodiscard]] std::string fit_report_json(const FitReport& report, int session_id, const Provenance& provenance);
[[nodiscard]] std::string fit_failure_json(int session_id, const std::string& reason, const Provenance& provenance);
[[nodiscard]] std::string backtest_report_json(const BacktestReport& report, const Provenance& provenance);

} // namespace gchp
