#pragma once

#include "gchp/hawkes.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gchp::diagnostics {

struct WindowCounts {
    double tau{0.0};
    std::vector<std::size_t> counts; // events in [k tau, (k+1) tau), whole windows only
};

[[nodiscard]] WindowCounts window_counts(const EventSeries& events, double tau);

enum class Family { Exponential, Gamma, Weibull, Reciprocal, Wald };

[[nodiscard]] std::string_view to_string(Family family) noexcept;

// Parameter meaning by family:
//   Exponential: first = rate
//   Gamma:       first = shape, second = scale
//   Weibull:     first = shape, second = scale
//   Reciprocal:  first = lower, second = upper   (log-uniform on [lower, upper])
//   Wald:        first = mean,  second = shape   (inverse Gaussian)
struct DistributionFit {
    Family family{Family::Exponential};
    double first{0.0};
    double second{0.0};
    double ks_distance{0.0};
};

[[nodiscard]] double cdf(const DistributionFit& fit, double x);

// Gaps between consecutive events, zero gaps dropped.
[[nodiscard]] std::vector<double> interarrival_times(const EventSeries& events);

// Shape parameters (and Wald's shape/mean ratio) are kept inside [1e-3, 1e3].
inline constexpr double kShapeMin = 1e-3;
inline constexpr double kShapeMax = 1e3;

// Maximum-likelihood fit of every family, ranked by ascending KS distance.
// Throws Error(TooFewSamples) with fewer than 10 positive gaps.
[[nodiscard]] std::vector<DistributionFit> fit_distributions(std::span<const double> samples);
[[nodiscard]] std::vector<DistributionFit> fit_interarrival_distributions(const EventSeries& events);

// Sup-norm distance between the empirical CDF of `samples` and `fit`.
[[nodiscard]] double ks_distance(std::span<const double> samples, const DistributionFit& fit);

struct CdfRow {
    double x;
    double empirical;
    std::vector<double> fitted; // same order as the fits passed in
};

// Plot table of the empirical and fitted CDFs at `points` sample quantiles.
[[nodiscard]] std::vector<CdfRow> cdf_table(std::span<const double> samples, std::span<const DistributionFit> fits,
                                            std::size_t points = 200);

struct LagCorrelation {
    double delta{0.0};
    std::size_t pairs{0};
    std::optional<double> value; // empty when the lag could not be computed
    std::string error;
};

struct AutocorrelationOptions {
    double origin{0.0};
    std::size_t min_pairs{30};
};

// Pearson correlation between counts on [t, t+tau) and [t+tau+delta, t+2tau+delta)
// for t = origin, origin+tau, ... Lags with too few pairs or constant counts
// carry an InsufficientData message instead of a value.
[[nodiscard]] std::vector<LagCorrelation> autocorrelation(const EventSeries& events, double tau,
                                                          std::span<const double> lags,
                                                          const AutocorrelationOptions& options = {});

struct HistogramBin {
    double lower;
    double upper;
    std::size_t count;
};

// Fixed-width bins spanning [min, max] of the values.
[[nodiscard]] std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);

} // namespace gchp::diagnostics
