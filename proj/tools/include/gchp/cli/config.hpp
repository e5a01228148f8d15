#pragma once

#include "gchp/calibration.hpp"
#include "gchp/io.hpp"
#include "gchp/lob.hpp"
#include "gchp/predict.hpp"
#include "gchp/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gchp::cli {

// Bad flag, bad key or bad value: exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing or unreadable input: exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat "section.key" -> text map. Every key has a default (possibly empty,
// meaning unset); unknown keys are rejected so typos do not pass silently.
class Settings {
public:
    Settings();

    // INI file with [section] headers. Values already set on the command line
    // should be applied afterwards with set().
    void load_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);
    // "section.key=value"
    void set_assignment(std::string_view assignment);

    [[nodiscard]] const std::string& get(const std::string& key) const;
    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

    // Sorted key=value lines; the config hash is taken over this text.
    [[nodiscard]] std::string canonical() const;

private:
    std::map<std::string, std::string> values_;
};

// Seconds from "90", "90s", "15m", "3h", "1h30m" or a clock time "09:30[:00]".
[[nodiscard]] double parse_duration(std::string_view text);

struct DiagnoseSettings {
    double tau{60.0};
    std::vector<double> lags;
    std::size_t bins{20};
    std::size_t cdf_points{200};
};

struct RunConfig {
    std::uint64_t seed{0};
    std::filesystem::path out{"."};
    std::vector<std::filesystem::path> inputs;

    lob::FormatSpec format;
    double tick{0.01};
    double max_reject_ratio{lob::kDefaultMaxRejectRatio};
    std::optional<lob::SessionCalendar> calendar;

    std::vector<ModelKind> kinds;
    CalibrationOptions calibration;
    PredictConfig predict;
    bool dump_paths{false};

    DiagnoseSettings diagnose;

    GchpGenerator generator{HawkesParams(1.0, 0.5, 1.0), {0.01, -0.01},
                            TransitionMatrix(Eigen::MatrixXd::Constant(2, 2, 0.5))};
    std::size_t days{1};

    Provenance provenance;
};

// Typed, validated view of the settings. Throws ConfigError.
[[nodiscard]] RunConfig make_run_config(const Settings& settings);

// Inputs as given, with directories expanded to their sorted *.csv files.
// Throws InputError naming the first path that does not exist.
[[nodiscard]] std::vector<std::filesystem::path> resolve_inputs(const std::vector<std::filesystem::path>& inputs);

} // namespace gchp::cli
