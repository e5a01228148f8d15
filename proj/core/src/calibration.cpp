#include "gchp/calibration.hpp"

#include "gchp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gchp {

namespace {

[[noreturn]] void rethrow_tagged(const Error& e, ModelKind kind) {
    throw Error(e.code(), std::string(to_string(kind)) + ": " + e.detail());
}

void require_events(std::size_t events, const CalibrationOptions& options) {
    if (events < options.min_events) {
        throw Error(ErrorCode::TooFewEvents, "window has " + std::to_string(events) +
                                                 " mid-price changes, need at least " +
                                                 std::to_string(options.min_events));
    }
}

} // namespace

GchpModel assemble_gchp(const PriceMoveSeries& moves, ModelKind kind, const HawkesParams& hawkes,
                        std::size_t nsdo_states) {
    StateSpace space = build_state_space(moves, kind, nsdo_states);
    const auto states = classify_moves(space, moves);
    TransitionMatrix P = estimate_transition_matrix(states, space.size());
    StationaryDistribution pi = stationary_distribution(P);
    LimitParams limits = compute_limit_params(space, P, pi, hawkes);
    return GchpModel{kind, hawkes, std::move(space), std::move(P), std::move(pi), std::move(limits)};
}

GchpModel fit_gchp(const lob::MidSeries& mid, const PriceMoveSeries& moves, ModelKind kind,
                   const CalibrationOptions& options) {
    try {
        const EventSeries events = lob::event_series(mid);
        require_events(events.size(), options);
        const HawkesFit fit = fit_mle(events, options.hawkes);
        return assemble_gchp(moves, kind, fit.params, options.nsdo_states);
    } catch (const Error& e) {
        rethrow_tagged(e, kind);
    }
}

DeviationCurve window_deviations(const lob::MidSeries& mid, const EventSeries& events, double a_star,
                                 std::span<const double> window_sizes, std::size_t min_windows) {
    DeviationCurve curve;
    const double horizon = events.horizon();
    for (double n : window_sizes) {
        if (!(n > 0.0)) throw std::invalid_argument("window_deviations: window sizes must be positive");
        const auto blocks = static_cast<std::size_t>(std::floor(horizon / n));
        if (blocks < std::max<std::size_t>(min_windows, 2)) {
            curve.skipped.push_back({n, std::string(to_string(ErrorCode::WindowTooLarge)) + ": " +
                                            std::to_string(blocks) + " windows of " + std::to_string(n) +
                                            " s, need " + std::to_string(min_windows)});
            continue;
        }
        std::vector<double> deviations(blocks);
        double s_prev = lob::mid_at(mid, 0.0);
        auto n_prev = static_cast<double>(events.count_until(0.0));
        for (std::size_t i = 0; i < blocks; ++i) {
            const double end = static_cast<double>(i + 1) * n;
            const double s_end = lob::mid_at(mid, end);
            const auto n_end = static_cast<double>(events.count_until(end));
            deviations[i] = s_end - s_prev - (n_end - n_prev) * a_star;
            s_prev = s_end;
            n_prev = n_end;
        }
        double mean = 0.0;
        for (double d : deviations) mean += d;
        mean /= static_cast<double>(blocks);
        double ss = 0.0;
        for (double d : deviations) ss += (d - mean) * (d - mean);
        curve.points.push_back({n, blocks, std::sqrt(ss / static_cast<double>(blocks - 1))});
    }
    return curve;
}

RegressionResult regression_error_rate(const DeviationCurve& curve, const LimitParams& limits,
                                       const HawkesParams& hawkes, ErrorRateFormula formula) {
    if (curve.points.size() < 2) {
        throw Error(ErrorCode::DegenerateCurve, "regression needs at least 2 curve points, got " +
                                                    std::to_string(curve.points.size()));
    }
    double num = 0.0;
    double den = 0.0;
    bool all_zero = true;
    for (const auto& p : curve.points) {
        num += p.window * p.std_dev * p.std_dev;
        den += p.window * p.window;
        all_zero = all_zero && p.std_dev == 0.0;
    }
    if (all_zero) throw Error(ErrorCode::DegenerateCurve, "every window deviation is zero");

    RegressionResult out;
    out.c = num / den;
    const double rate_factor = std::sqrt(hawkes.stationary_rate());
    out.theoretical = formula == ErrorRateFormula::DerivationConsistent ? limits.sigma() * rate_factor
                                                                        : limits.sigma_star * rate_factor;
    const double root_c = std::sqrt(out.c);
    out.error_rate = std::abs((root_c - out.theoretical) / root_c);
    return out;
}

const KindFit& FitReport::best() const {
    for (const auto& k : kinds) {
        if (k.kind == chosen && k.ok()) return k;
    }
    throw std::logic_error("FitReport has no successful fit for the chosen kind");
}

FitReport select_model(const lob::MidSeries& mid, const PriceMoveSeries& moves, std::span<const ModelKind> kinds,
                       const CalibrationOptions& options) {
    if (kinds.empty()) throw std::invalid_argument("select_model: no model kinds given");
    FitReport report;
    const EventSeries events = lob::event_series(mid);
    report.events = events.size();
    report.horizon = events.horizon();

    std::string shared_failure;
    try {
        require_events(events.size(), options);
        report.hawkes = fit_mle(events, options.hawkes);
    } catch (const Error& e) {
        shared_failure = e.what();
    }

    double best_rate = std::numeric_limits<double>::infinity();
    bool any = false;
    for (ModelKind kind : kinds) {
        KindFit fit{kind, std::nullopt, {}, std::nullopt, {}};
        if (!shared_failure.empty()) {
            fit.error = shared_failure;
            report.kinds.push_back(std::move(fit));
            continue;
        }
        try {
            fit.model = assemble_gchp(moves, kind, report.hawkes->params, options.nsdo_states);
            fit.curve = window_deviations(mid, events, fit.model->limits.a_star, options.window_sizes,
                                          options.min_windows);
            fit.regression = regression_error_rate(fit.curve, fit.model->limits, fit.model->hawkes, options.formula);
        } catch (const Error& e) {
            fit.error = e.what();
            fit.regression.reset();
        }
        if (fit.ok() && fit.regression->error_rate < best_rate) {
            best_rate = fit.regression->error_rate;
            report.chosen = kind;
            any = true;
        }
        report.kinds.push_back(std::move(fit));
    }
    if (!any) {
        std::string reasons;
        for (const auto& k : report.kinds) {
            reasons += (reasons.empty() ? "" : "; ") + std::string(to_string(k.kind)) + ": " + k.error;
        }
        throw Error(ErrorCode::AllKindsFailed, reasons);
    }
    return report;
}

} // namespace gchp
