#pragma once

#include "gchp/calibration.hpp"
#include "gchp/diagnostics.hpp"
#include "gchp/lob.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gchp {

enum class PredictMethod { DiffusiveMean, DiffusiveNoisy, JumpDiffusionNoisy, MonteCarlo };

[[nodiscard]] std::string_view to_string(PredictMethod method) noexcept;
[[nodiscard]] PredictMethod parse_predict_method(std::string_view name);

struct PredictConfig {
    double train_len{3.0 * 3600.0};
    double test_len{2.0 * 3600.0};
    double step{3600.0};
    double alpha3{0.025};
    double alpha2{0.04};
    PredictMethod method{PredictMethod::DiffusiveMean};
    std::size_t paths{250};
    std::size_t draws{1000};
    std::uint64_t seed{0};
    bool keep_endpoints{false};

    void validate() const;
};

// s0 + a_star * lambda / (1 - mu) * t
[[nodiscard]] double predict_diffusive_mean(const GchpModel& model, double s0, double horizon);

struct SampledPrediction {
    double mean{0.0};
    double std_error{0.0}; // sample std of the draws / sqrt(draws)
};

// Mean over draws of s0 + a_star lambda/(1-mu) t + sigma_bar sqrt(t) Z.
[[nodiscard]] SampledPrediction sample_diffusive_noisy(const GchpModel& model, double s0, double horizon,
                                                       std::size_t draws, std::uint64_t seed);
[[nodiscard]] double predict_diffusive_noisy(const GchpModel& model, double s0, double horizon, std::size_t draws,
                                             std::uint64_t seed);

// Mean over draws of s0 + N(t) a_star + sigma* sqrt(t) sqrt(lambda/(1-mu)) Z
// with N(t) a fresh Hawkes count per draw.
[[nodiscard]] SampledPrediction sample_jump_diffusion_noisy(const GchpModel& model, double s0, double horizon,
                                                            std::size_t draws, std::uint64_t seed);
[[nodiscard]] double predict_jump_diffusion_noisy(const GchpModel& model, double s0, double horizon,
                                                  std::size_t draws, std::uint64_t seed);

struct MonteCarloPrediction {
    double mean{0.0};
    std::vector<double> endpoints;
};

// Simulates `paths` mid-price paths over [0, horizon]: Hawkes event count,
// then one chain step per event from `last_state`, adding a(state) each time.
[[nodiscard]] MonteCarloPrediction predict_monte_carlo(const GchpModel& model, double s0, std::size_t last_state,
                                                       double horizon, std::size_t paths, std::uint64_t seed);

enum class Direction { Up = 0, Stationary = 1, Down = 2 };
enum class Volatility { Volatile = 0, Calm = 1 };

[[nodiscard]] std::string_view to_string(Direction d) noexcept;
[[nodiscard]] std::string_view to_string(Volatility v) noexcept;

// Strict thresholds: a move of exactly +-alpha is Stationary / Calm.
[[nodiscard]] Direction classify3(double delta, double alpha3);
[[nodiscard]] Volatility classify2(double delta, double alpha2);

struct WindowRecord {
    std::size_t window{0};
    double start{0.0};
    double train_end{0.0};
    double test_end{0.0};
    ModelKind kind{ModelKind::DO};
    double error_rate{0.0};
    double lambda0{0.0};
    double alpha{0.0};
    double beta{0.0};
    double a_star{0.0};
    double sigma_star{0.0};
    double sigma_bar{0.0};
    std::size_t last_state{0};
    double s0{0.0};
    double s_true{0.0};
    double s_pred{0.0};
    double delta_true{0.0};
    double delta_pred{0.0};
    Direction true3{Direction::Stationary};
    Direction pred3{Direction::Stationary};
    Volatility true2{Volatility::Calm};
    Volatility pred2{Volatility::Calm};
    std::vector<double> endpoints; // Monte Carlo only, when requested
};

struct SkippedWindow {
    std::size_t window{0};
    double start{0.0};
    std::string reason;
};

using Confusion3 = std::array<std::array<std::size_t, 3>, 3>; // [truth][prediction]
using Confusion2 = std::array<std::array<std::size_t, 2>, 2>;

struct BacktestReport {
    PredictConfig config;
    int session_id{0};
    std::vector<WindowRecord> records;
    std::vector<SkippedWindow> skipped;
    Confusion3 confusion3{};
    Confusion2 confusion2{};
};

// Window starts 0, step, 2 step, ... with start + train + test <= horizon.
[[nodiscard]] std::size_t walk_forward_windows(double horizon, const PredictConfig& config);

// Train on [start, start+train) only, select the best kind, predict the mid at
// start+train+test and score it against the last observed mid at that time.
// Fitting failures become skip records.
[[nodiscard]] BacktestReport walk_forward(const lob::MidSeries& mid, const PriceMoveSeries& moves,
                                          const PredictConfig& config, std::span<const ModelKind> kinds,
                                          const CalibrationOptions& calibration = {});

// Merges the records and confusion counts of several reports (same config).
[[nodiscard]] BacktestReport merge_reports(std::span<const BacktestReport> reports);

struct MetricsSummary {
    std::size_t scored{0};
    std::array<std::optional<double>, 3> recall3{}; // empty if the class never occurs in truth
    std::array<std::optional<double>, 2> recall2{};
    double accuracy3{0.0};
    double accuracy2{0.0};
    double error_mean{0.0}; // of s_pred - s_true
    double error_std{0.0};
    std::vector<diagnostics::HistogramBin> histogram;
};

inline constexpr std::size_t kErrorHistogramBins = 21;

// Throws Error(EmptyReport) if no window was scored.
[[nodiscard]] MetricsSummary report_metrics(const BacktestReport& report, std::size_t bins = kErrorHistogramBins);

} // namespace gchp
