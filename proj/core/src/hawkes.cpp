#include "gchp/hawkes.hpp"

#include "gchp/error.hpp"
#include "gchp/optimize.hpp"
#include "gchp/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gchp {

HawkesParams::HawkesParams(double lambda0, double alpha, double beta)
    : lambda0_(lambda0), alpha_(alpha), beta_(beta) {
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
        throw std::invalid_argument("HawkesParams: lambda0 must be positive and finite");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("HawkesParams: alpha must be non-negative and finite");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("HawkesParams: beta must be positive and finite");
    }
    if (!(alpha / beta < 1.0)) {
        throw std::invalid_argument("HawkesParams: branching ratio alpha/beta must be < 1");
    }
}

EventSeries::EventSeries(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("EventSeries: horizon must be finite and non-negative");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double t = times_[i];
        if (!(t >= 0.0) || t > horizon) {
            throw std::invalid_argument("EventSeries: event time " + std::to_string(t) +
                                        " outside [0, horizon]");
        }
        if (i > 0 && !(t > times_[i - 1])) {
            throw std::invalid_argument("EventSeries: event times must be strictly increasing");
        }
    }
}

std::size_t EventSeries::count_until(double t) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

double branching_ratio(const HawkesParams& params) noexcept { return params.branching_ratio(); }

double intensity_at(const HawkesParams& params, const EventSeries& events, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("intensity_at: t must be non-negative");
    double excitation = 0.0;
    for (double ti : events.times()) {
        if (!(ti < t)) break;
        excitation += std::exp(-params.beta() * (t - ti));
    }
    return params.lambda0() + params.alpha() * excitation;
}

namespace {

// Log-likelihood on raw doubles; shared by the public entry point and the
// optimizer, which probes parameter values HawkesParams would reject.
double raw_log_likelihood(double lambda0, double alpha, double beta,
                          std::span<const double> times, double horizon) {
    double sum_log = 0.0;
    double decayed = 0.0; // sum_{j<i} exp(-beta (t_i - t_j))
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) decayed = std::exp(-beta * (times[i] - times[i - 1])) * (1.0 + decayed);
        const double intensity = lambda0 + alpha * decayed;
        if (!(intensity > 0.0)) return -std::numeric_limits<double>::infinity();
        sum_log += std::log(intensity);
    }
    // sum_i exp(-beta (T - t_i)) folds into the same recursion.
    double tail = 0.0;
    if (!times.empty()) tail = std::exp(-beta * (horizon - times.back())) * (1.0 + decayed);
    const double compensator =
        lambda0 * horizon + (alpha / beta) * (static_cast<double>(times.size()) - tail);
    return sum_log - compensator;
}

struct Box {
    double log_lambda_lo, log_lambda_hi;
    double log_beta_lo, log_beta_hi;
    double ratio_hi;
};

template <typename OnEvent>
void thinning(const HawkesParams& params, double horizon, std::uint64_t seed, OnEvent&& on_event) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("simulate: horizon must be positive and finite");
    }
    Rng rng(seed);
    std::exponential_distribution<double> unit_exp(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double lambda0 = params.lambda0();
    const double alpha = params.alpha();
    const double beta = params.beta();

    double t = 0.0;
    double last = -1.0;
    double excitation = 0.0; // sum over accepted events of alpha exp(-beta (t - t_i))
    while (true) {
        // The intensity only decays between events, so its current value bounds
        // it until the next candidate.
        const double bound = lambda0 + excitation;
        const double wait = unit_exp(rng) / bound;
        t += wait;
        if (t > horizon) break;
        excitation *= std::exp(-beta * wait);
        if (unit(rng) * bound <= lambda0 + excitation) {
            if (t > last) {
                on_event(t);
                last = t;
            }
            excitation += alpha;
        }
    }
}

} // namespace

double log_likelihood(const HawkesParams& params, const EventSeries& events) {
    return raw_log_likelihood(params.lambda0(), params.alpha(), params.beta(), events.times(),
                              events.horizon());
}

HawkesFit fit_mle(const EventSeries& events, const FitConfig& config) {
    if (events.size() < 2) {
        throw Error(ErrorCode::TooFewEvents,
                    "Hawkes fit needs at least 2 events, got " + std::to_string(events.size()));
    }
    if (config.starts < 1) throw std::invalid_argument("fit_mle: starts must be >= 1");
    if (!(events.horizon() > 0.0)) throw std::invalid_argument("fit_mle: horizon must be positive");
    if (!(config.max_branching > 0.0 && config.max_branching < 1.0)) {
        throw std::invalid_argument("fit_mle: max_branching must lie in (0, 1)");
    }

    const double rate = static_cast<double>(events.size()) / events.horizon();
    const double lambda_lo = config.lambda_min > 0.0 ? config.lambda_min : 1e-4 * rate;
    const double lambda_hi = config.lambda_max > 0.0 ? config.lambda_max : 1.5 * rate;
    if (!(lambda_lo < lambda_hi) || !(config.beta_min > 0.0 && config.beta_min < config.beta_max)) {
        throw std::invalid_argument("fit_mle: empty parameter box");
    }
    const Box box{std::log(lambda_lo), std::log(lambda_hi), std::log(config.beta_min),
                  std::log(config.beta_max), config.max_branching};

    const auto times = events.times();
    const double horizon = events.horizon();

    struct Decoded {
        double lambda0, alpha, beta, ratio;
    };
    auto decode = [&](std::span<const double> x) {
        const double log_lambda = std::clamp(x[0], box.log_lambda_lo, box.log_lambda_hi);
        const double log_beta = std::clamp(x[1], box.log_beta_lo, box.log_beta_hi);
        const double beta = std::exp(log_beta);
        double ratio = std::clamp(x[2], 0.0, box.ratio_hi);
        double alpha = ratio * beta;
        if (alpha > config.alpha_max) {
            alpha = config.alpha_max;
            ratio = alpha / beta;
        }
        return Decoded{std::exp(log_lambda), alpha, beta, ratio};
    };
    auto outside = [&](std::span<const double> x) {
        auto excess = [](double v, double lo, double hi) {
            return v < lo ? lo - v : (v > hi ? v - hi : 0.0);
        };
        const double a = excess(x[0], box.log_lambda_lo, box.log_lambda_hi);
        const double b = excess(x[1], box.log_beta_lo, box.log_beta_hi);
        const double c = excess(x[2], 0.0, box.ratio_hi);
        return a * a + b * b + c * c;
    };
    // Negative log-likelihood of the box-clipped point plus a quadratic pull
    // back toward the box so the simplex does not drift on flat clipped regions.
    const double scale = static_cast<double>(events.size());
    auto objective = [&](std::span<const double> x) {
        const Decoded d = decode(x);
        return -raw_log_likelihood(d.lambda0, d.alpha, d.beta, times, horizon) + scale * outside(x);
    };

    const auto grid = optim::scrambled_halton(static_cast<std::size_t>(config.starts), 3, config.start_seed);
    const std::array<double, 3> step{0.1 * (box.log_lambda_hi - box.log_lambda_lo),
                                     0.1 * (box.log_beta_hi - box.log_beta_lo), 0.1 * box.ratio_hi};
    optim::NelderMeadOptions options;
    options.max_evaluations = config.max_evaluations;
    options.f_tolerance = config.f_tolerance;
    options.x_tolerance = config.x_tolerance;

    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    int evaluations = 0;
    int boundary_starts = 0;
    for (const auto& u : grid) {
        const std::array<double, 3> x0{
            box.log_lambda_lo + u[0] * (box.log_lambda_hi - box.log_lambda_lo),
            box.log_beta_lo + u[1] * (box.log_beta_hi - box.log_beta_lo),
            u[2] * box.ratio_hi,
        };
        const auto result = optim::nelder_mead(objective, x0, step, options);
        evaluations += result.evaluations;
        const Decoded d = decode(result.x);
        if (d.ratio >= box.ratio_hi * (1.0 - 1e-6)) ++boundary_starts;
        if (result.value < best_value) {
            best_value = result.value;
            best_x = result.x;
        }
    }

    if (boundary_starts == config.starts) {
        throw Error(ErrorCode::NonStationaryFit,
                    "every start converged to the stationarity boundary alpha/beta = " +
                        std::to_string(config.max_branching));
    }

    const Decoded d = decode(best_x);
    HawkesParams params(d.lambda0, d.alpha, d.beta);
    return HawkesFit{params, log_likelihood(params, events), evaluations, boundary_starts};
}

EventSeries simulate(const HawkesParams& params, double horizon, std::uint64_t seed) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(params.stationary_rate() * horizon * 1.1) + 16);
    thinning(params, horizon, seed, [&](double t) { times.push_back(t); });
    return EventSeries(std::move(times), horizon);
}

std::size_t simulate_count(const HawkesParams& params, double horizon, std::uint64_t seed) {
    std::size_t count = 0;
    thinning(params, horizon, seed, [&](double) { ++count; });
    return count;
}

} // namespace gchp
