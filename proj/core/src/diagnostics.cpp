#include "gchp/diagnostics.hpp"

#include "gchp/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gchp::diagnostics {

WindowCounts window_counts(const EventSeries& events, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("window_counts: tau must be positive");
    WindowCounts out{tau, {}};
    const auto windows = static_cast<std::size_t>(std::floor(events.horizon() / tau));
    out.counts.assign(windows, 0);
    for (double t : events.times()) {
        const auto k = static_cast<std::size_t>(std::floor(t / tau));
        if (k < windows) ++out.counts[k];
    }
    return out;
}

std::string_view to_string(Family family) noexcept {
    switch (family) {
        case Family::Exponential: return "Exponential";
        case Family::Gamma: return "Gamma";
        case Family::Weibull: return "Weibull";
        case Family::Reciprocal: return "Reciprocal";
        case Family::Wald: return "Wald";
    }
    return "?";
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// log Phi(-b) for b >= 0, stable far into the tail.
double log_upper_normal_tail(double b) {
    if (b < 30.0) return std::log(0.5 * std::erfc(b / std::sqrt(2.0)));
    const double b2 = b * b;
    return -0.5 * b2 - std::log(b * std::sqrt(2.0 * M_PI)) + std::log1p(-1.0 / b2 + 3.0 / (b2 * b2));
}

double wald_cdf(double x, double mean, double shape) {
    if (x <= 0.0) return 0.0;
    const double root = std::sqrt(shape / x);
    const double a = root * (x / mean - 1.0);
    const double b = root * (x / mean + 1.0);
    const double second = std::exp(2.0 * shape / mean + log_upper_normal_tail(b));
    return std::clamp(normal_cdf(a) + second, 0.0, 1.0);
}

DistributionFit fit_exponential(double mean) {
    return {Family::Exponential, 1.0 / mean, 0.0, 0.0};
}

DistributionFit fit_gamma(double mean, double mean_log) {
    const double s = std::log(mean) - mean_log;
    double shape = kShapeMax;
    if (s > 0.0) {
        shape = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
        for (int i = 0; i < 50; ++i) {
            const double f = std::log(shape) - boost::math::digamma(shape) - s;
            const double df = 1.0 / shape - boost::math::trigamma(shape);
            const double next = std::clamp(shape - f / df, shape / 10.0, shape * 10.0);
            const bool done = std::abs(next - shape) <= 1e-12 * shape;
            shape = next;
            if (done || shape > kShapeMax) break;
        }
    }
    shape = std::clamp(shape, kShapeMin, kShapeMax);
    return {Family::Gamma, shape, mean / shape, 0.0};
}

DistributionFit fit_weibull(std::span<const double> x, double mean_log) {
    // Work with y = x / geometric_mean so mean(log y) = 0.
    std::vector<double> log_y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) log_y[i] = std::log(x[i]) - mean_log;
    const double max_log = *std::max_element(log_y.begin(), log_y.end());

    // h(k) = sum y^k log y / sum y^k - 1/k, increasing in k; root is the MLE.
    auto h = [&](double k) {
        double num = 0.0;
        double den = 0.0;
        for (double ly : log_y) {
            const double w = std::exp(k * (ly - max_log));
            num += w * ly;
            den += w;
        }
        return num / den - 1.0 / k;
    };
    double lo = std::log(kShapeMin);
    double hi = std::log(kShapeMax);
    double shape;
    if (h(std::exp(hi)) <= 0.0) {
        shape = kShapeMax;
    } else if (h(std::exp(lo)) >= 0.0) {
        shape = kShapeMin;
    } else {
        for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
            const double mid = 0.5 * (lo + hi);
            (h(std::exp(mid)) < 0.0 ? lo : hi) = mid;
        }
        shape = std::exp(0.5 * (lo + hi));
    }
    // scale = gm * (mean y^k)^(1/k), evaluated in logs.
    double sum = 0.0;
    for (double ly : log_y) sum += std::exp(shape * (ly - max_log));
    const double log_scale = mean_log + max_log + std::log(sum / static_cast<double>(log_y.size())) / shape;
    return {Family::Weibull, shape, std::exp(log_scale), 0.0};
}

DistributionFit fit_wald(std::span<const double> x, double mean) {
    double mean_inverse = 0.0;
    for (double v : x) mean_inverse += 1.0 / v;
    mean_inverse /= static_cast<double>(x.size());
    const double inverse_shape = mean_inverse - 1.0 / mean;
    double shape = inverse_shape > 0.0 ? 1.0 / inverse_shape : kShapeMax * mean;
    shape = std::clamp(shape, kShapeMin * mean, kShapeMax * mean);
    return {Family::Wald, mean, shape, 0.0};
}

} // namespace

double cdf(const DistributionFit& fit, double x) {
    switch (fit.family) {
        case Family::Exponential:
            return x <= 0.0 ? 0.0 : -std::expm1(-fit.first * x);
        case Family::Gamma:
            return x <= 0.0 ? 0.0 : boost::math::gamma_p(fit.first, x / fit.second);
        case Family::Weibull:
            return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / fit.second, fit.first));
        case Family::Reciprocal:
            if (x < fit.first) return 0.0;
            if (x >= fit.second) return 1.0;
            return std::log(x / fit.first) / std::log(fit.second / fit.first);
        case Family::Wald:
            return wald_cdf(x, fit.first, fit.second);
    }
    return 0.0;
}

std::vector<double> interarrival_times(const EventSeries& events) {
    std::vector<double> gaps;
    const auto times = events.times();
    if (times.size() > 1) gaps.reserve(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double gap = times[i] - times[i - 1];
        if (gap > 0.0) gaps.push_back(gap);
    }
    return gaps;
}

double ks_distance(std::span<const double> samples, const DistributionFit& fit) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = cdf(fit, sorted[i]);
        d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    return std::clamp(d, 0.0, 1.0);
}

std::vector<DistributionFit> fit_distributions(std::span<const double> raw) {
    std::vector<double> x;
    x.reserve(raw.size());
    for (double v : raw) {
        if (v > 0.0 && std::isfinite(v)) x.push_back(v);
    }
    if (x.size() < 10) {
        throw Error(ErrorCode::TooFewSamples, "distribution fitting needs at least 10 positive samples, got " +
                                                  std::to_string(x.size()));
    }
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double mean_log = 0.0;
    for (double v : x) mean_log += std::log(v);
    mean_log /= n;

    std::vector<DistributionFit> fits{
        fit_exponential(mean),
        fit_gamma(mean, mean_log),
        fit_weibull(x, mean_log),
        DistributionFit{Family::Reciprocal, x.front(), x.back(), 0.0},
        fit_wald(x, mean),
    };
    for (auto& f : fits) f.ks_distance = ks_distance(x, f);
    std::stable_sort(fits.begin(), fits.end(),
                     [](const DistributionFit& a, const DistributionFit& b) { return a.ks_distance < b.ks_distance; });
    return fits;
}

std::vector<DistributionFit> fit_interarrival_distributions(const EventSeries& events) {
    return fit_distributions(interarrival_times(events));
}

std::vector<CdfRow> cdf_table(std::span<const double> samples, std::span<const DistributionFit> fits,
                              std::size_t points) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<CdfRow> rows;
    if (sorted.empty() || points == 0) return rows;
    const std::size_t count = std::min(points, sorted.size());
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = count == 1 ? sorted.size() - 1 : k * (sorted.size() - 1) / (count - 1);
        const double x = sorted[idx];
        const auto upper = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        CdfRow row{x, static_cast<double>(upper) / static_cast<double>(sorted.size()), {}};
        for (const auto& f : fits) row.fitted.push_back(cdf(f, x));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LagCorrelation> autocorrelation(const EventSeries& events, double tau, std::span<const double> lags,
                                            const AutocorrelationOptions& options) {
    if (!(tau > 0.0)) throw std::invalid_argument("autocorrelation: tau must be positive");
    const auto times = events.times();
    auto count = [&](double a, double b) {
        const auto lo = std::lower_bound(times.begin(), times.end(), a);
        const auto hi = std::lower_bound(times.begin(), times.end(), b);
        return static_cast<double>(hi - lo);
    };

    std::vector<LagCorrelation> out;
    out.reserve(lags.size());
    for (double delta : lags) {
        if (delta < -tau) throw std::invalid_argument("autocorrelation: lag must be >= -tau");
        LagCorrelation lag{delta, 0, std::nullopt, {}};
        std::vector<double> first;
        std::vector<double> second;
        for (std::size_t k = 0;; ++k) {
            const double t = options.origin + static_cast<double>(k) * tau;
            if (t + 2.0 * tau + delta > events.horizon()) break;
            first.push_back(count(t, t + tau));
            second.push_back(count(t + tau + delta, t + 2.0 * tau + delta));
        }
        lag.pairs = first.size();
        if (lag.pairs < options.min_pairs) {
            lag.error = std::string(to_string(ErrorCode::InsufficientData)) + ": " + std::to_string(lag.pairs) +
                        " window pairs < " + std::to_string(options.min_pairs);
            out.push_back(std::move(lag));
            continue;
        }
        const auto n = static_cast<double>(lag.pairs);
        const double mean_x = std::accumulate(first.begin(), first.end(), 0.0) / n;
        const double mean_y = std::accumulate(second.begin(), second.end(), 0.0) / n;
        double sxx = 0.0;
        double syy = 0.0;
        double sxy = 0.0;
        for (std::size_t i = 0; i < first.size(); ++i) {
            const double dx = first[i] - mean_x;
            const double dy = second[i] - mean_y;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        if (sxx == 0.0 || syy == 0.0) {
            lag.error = std::string(to_string(ErrorCode::InsufficientData)) + ": constant window counts";
        } else if (first == second) {
            lag.value = 1.0; // lag -tau compares each window with itself
        } else {
            lag.value = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
        }
        out.push_back(std::move(lag));
    }
    return out;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
    std::vector<HistogramBin> out;
    if (values.empty() || bins == 0) return out;
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    double lo = *min_it;
    double hi = *max_it;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out.push_back({lo + static_cast<double>(b) * width, lo + static_cast<double>(b + 1) * width, 0});
    }
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        ++out[std::min(b, bins - 1)].count;
    }
    return out;
}

} // namespace gchp::diagnostics
