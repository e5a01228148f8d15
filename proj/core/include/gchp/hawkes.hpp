#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace gchp {

// Parameters of a one-dimensional Hawkes process with exponential kernel
//   lambda(t) = lambda0 + sum_{t_i < t} alpha * exp(-beta (t - t_i)).
// Construction enforces lambda0 > 0, alpha >= 0, beta > 0 and alpha/beta < 1.
class HawkesParams {
public:
    HawkesParams(double lambda0, double alpha, double beta);

    [[nodiscard]] double lambda0() const noexcept { return lambda0_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    // alpha / beta, the mean number of direct offspring per event.
    [[nodiscard]] double branching_ratio() const noexcept { return alpha_ / beta_; }

    // Long-run event rate lambda0 / (1 - alpha/beta).
    [[nodiscard]] double stationary_rate() const noexcept { return lambda0_ / (1.0 - branching_ratio()); }

    friend bool operator==(const HawkesParams&, const HawkesParams&) = default;

private:
    double lambda0_;
    double alpha_;
    double beta_;
};

// Event times on [0, horizon], strictly increasing. Duplicate timestamps are
// rejected; ingestion separates ties before building a series.
class EventSeries {
public:
    EventSeries() = default;
    EventSeries(std::vector<double> times, double horizon);

    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] bool empty() const noexcept { return times_.empty(); }

    // N(t): number of events with time <= t.
    [[nodiscard]] std::size_t count_until(double t) const noexcept;

    friend bool operator==(const EventSeries&, const EventSeries&) = default;

private:
    std::vector<double> times_;
    double horizon_{0.0};
};

[[nodiscard]] double branching_ratio(const HawkesParams& params) noexcept;

// Conditional intensity at t given the events strictly before t.
[[nodiscard]] double intensity_at(const HawkesParams& params, const EventSeries& events, double t);

// sum_i log lambda(t_i) - integral_0^T lambda(u) du, with the compensator in
// closed form. Returns -infinity if any lambda(t_i) <= 0.
[[nodiscard]] double log_likelihood(const HawkesParams& params, const EventSeries& events);

struct FitConfig {
    // Multi-start Nelder-Mead over (log lambda0, log beta, alpha/beta).
    int starts{16};
    double max_branching{0.999};
    // Non-positive lambda bounds are derived from the empirical rate n/T:
    // [1e-4 * rate, 1.5 * rate].
    double lambda_min{0.0};
    double lambda_max{0.0};
    double alpha_max{std::numeric_limits<double>::infinity()};
    double beta_min{1e-4};
    double beta_max{1e3};
    int max_evaluations{600};
    double f_tolerance{1e-11};
    double x_tolerance{1e-6};
    std::uint64_t start_seed{0x5eedULL};
};

struct HawkesFit {
    HawkesParams params;
    double log_likelihood;
    int evaluations;
    // Starts whose optimum sits on the stationarity boundary alpha/beta = max_branching.
    int boundary_starts;
};

// Maximum-likelihood fit. Throws Error(TooFewEvents) with fewer than two events
// and Error(NonStationaryFit) when every start ends on the stationarity boundary.
[[nodiscard]] HawkesFit fit_mle(const EventSeries& events, const FitConfig& config = {});

// Ogata thinning on [0, horizon]. Pure function of (params, horizon, seed).
[[nodiscard]] EventSeries simulate(const HawkesParams& params, double horizon, std::uint64_t seed);

// Same as simulate() but only counts events; avoids storing the times.
[[nodiscard]] std::size_t simulate_count(const HawkesParams& params, double horizon, std::uint64_t seed);

} // namespace gchp
