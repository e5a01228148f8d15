#include "gchp/predict.hpp"

#include "gchp/error.hpp"
#include "gchp/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gchp {

std::string_view to_string(PredictMethod method) noexcept {
    switch (method) {
    case PredictMethod::DiffusiveMean: return "DiffusiveMean";
    case PredictMethod::DiffusiveNoisy: return "DiffusiveNoisy";
    case PredictMethod::JumpDiffusionNoisy: return "JumpDiffusionNoisy";
    case PredictMethod::MonteCarlo: return "MonteCarlo";
    }
    return "?";
}

PredictMethod parse_predict_method(std::string_view name) {
    std::string lower;
    for (char c : name) {
        if (c != '-' && c != '_') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "diffusivemean" || lower == "mean") return PredictMethod::DiffusiveMean;
    if (lower == "diffusivenoisy" || lower == "noisy") return PredictMethod::DiffusiveNoisy;
    if (lower == "jumpdiffusionnoisy" || lower == "jump") return PredictMethod::JumpDiffusionNoisy;
    if (lower == "montecarlo" || lower == "mc") return PredictMethod::MonteCarlo;
    throw std::invalid_argument("unknown prediction method '" + std::string(name) + "'");
}

void PredictConfig::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
    };
    positive(train_len, "train length");
    positive(test_len, "test length");
    positive(step, "step");
    positive(alpha3, "alpha3");
    positive(alpha2, "alpha2");
    if (paths < 1) throw std::invalid_argument("paths must be at least 1");
    if (draws < 1) throw std::invalid_argument("draws must be at least 1");
}

namespace {

double event_rate(const GchpModel& model) {
    return model.hawkes.lambda0() / (1.0 - model.hawkes.branching_ratio());
}

void require_horizon(double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("prediction horizon must be positive");
}

void require_draws(std::size_t draws) {
    if (draws < 1) throw std::invalid_argument("at least one draw required");
}

SampledPrediction summarize(double sum, double sum_sq, std::size_t n) {
    const double count = static_cast<double>(n);
    const double mean = sum / count;
    double var = n > 1 ? (sum_sq - count * mean * mean) / (count - 1.0) : 0.0;
    var = std::max(var, 0.0);
    return {mean, std::sqrt(var / count)};
}

} // namespace

double predict_diffusive_mean(const GchpModel& model, double s0, double horizon) {
    require_horizon(horizon);
    return s0 + model.limits.a_star * event_rate(model) * horizon;
}

SampledPrediction sample_diffusive_noisy(const GchpModel& model, double s0, double horizon, std::size_t draws,
                                         std::uint64_t seed) {
    require_draws(draws);
    const double center = predict_diffusive_mean(model, s0, horizon);
    const double scale = model.limits.sigma_bar * std::sqrt(horizon);
    if (scale == 0.0) return {center, 0.0};
    Rng rng(seed);
    std::normal_distribution<double> normal;
    // Accumulate the noise separately so the centre is not rounded into every term.
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double z = scale * normal(rng);
        sum += z;
        sum_sq += z * z;
    }
    const SampledPrediction noise = summarize(sum, sum_sq, draws);
    return {center + noise.mean, noise.std_error};
}

double predict_diffusive_noisy(const GchpModel& model, double s0, double horizon, std::size_t draws,
                               std::uint64_t seed) {
    return sample_diffusive_noisy(model, s0, horizon, draws, seed).mean;
}

SampledPrediction sample_jump_diffusion_noisy(const GchpModel& model, double s0, double horizon, std::size_t draws,
                                              std::uint64_t seed) {
    require_horizon(horizon);
    require_draws(draws);
    const double a_star = model.limits.a_star;
    const double scale = model.limits.sigma_star * std::sqrt(horizon) * std::sqrt(event_rate(model));
    Rng rng(derive_seed(seed, 0));
    std::normal_distribution<double> normal;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const auto n = simulate_count(model.hawkes, horizon, derive_seed(seed, i + 1));
        const double x = static_cast<double>(n) * a_star + scale * normal(rng);
        sum += x;
        sum_sq += x * x;
    }
    const SampledPrediction shift = summarize(sum, sum_sq, draws);
    return {s0 + shift.mean, shift.std_error};
}

double predict_jump_diffusion_noisy(const GchpModel& model, double s0, double horizon, std::size_t draws,
                                    std::uint64_t seed) {
    return sample_jump_diffusion_noisy(model, s0, horizon, draws, seed).mean;
}

MonteCarloPrediction predict_monte_carlo(const GchpModel& model, double s0, std::size_t last_state, double horizon,
                                         std::size_t paths, std::uint64_t seed) {
    require_horizon(horizon);
    if (paths < 1) throw std::invalid_argument("predict_monte_carlo: at least one path required");
    if (last_state >= model.P.size()) throw std::out_of_range("predict_monte_carlo: last state out of range");
    const auto& values = model.space.values();

    MonteCarloPrediction out;
    out.endpoints.reserve(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        const std::uint64_t path_seed = derive_seed(seed, p);
        const auto n = simulate_count(model.hawkes, horizon, derive_seed(path_seed, 0));
        Rng rng(derive_seed(path_seed, 1));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::size_t state = last_state;
        double shift = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            state = next_state(model.P, state, unit(rng));
            shift += values[state];
        }
        out.endpoints.push_back(s0 + shift);
    }
    double shift_sum = 0.0;
    for (double e : out.endpoints) shift_sum += e - s0;
    out.mean = s0 + shift_sum / static_cast<double>(paths);
    return out;
}

std::string_view to_string(Direction d) noexcept {
    switch (d) {
    case Direction::Up: return "Up";
    case Direction::Stationary: return "Stationary";
    case Direction::Down: return "Down";
    }
    return "?";
}

std::string_view to_string(Volatility v) noexcept {
    return v == Volatility::Volatile ? "Volatile" : "Calm";
}

Direction classify3(double delta, double alpha3) {
    if (!(alpha3 > 0.0)) throw std::invalid_argument("classify3: alpha must be positive");
    if (delta > alpha3) return Direction::Up;
    if (delta < -alpha3) return Direction::Down;
    return Direction::Stationary;
}

Volatility classify2(double delta, double alpha2) {
    if (!(alpha2 > 0.0)) throw std::invalid_argument("classify2: alpha must be positive");
    return std::abs(delta) > alpha2 ? Volatility::Volatile : Volatility::Calm;
}

std::size_t walk_forward_windows(double horizon, const PredictConfig& config) {
    config.validate();
    const double span = config.train_len + config.test_len;
    if (horizon < span) return 0;
    // Guard the floor against representation error in (horizon - span) / step.
    const double ratio = (horizon - span) / config.step;
    auto k = static_cast<std::size_t>(std::floor(ratio + 1e-9));
    while (k > 0 && static_cast<double>(k) * config.step + span > horizon * (1.0 + 1e-12)) --k;
    return k + 1;
}

namespace {

struct TrainingSlice {
    lob::MidSeries mid;
    PriceMoveSeries moves;
};

// Data strictly before `end`, rebased to `start`, with the mid observed at
// `start` as the opening point.
TrainingSlice slice_training(const lob::MidSeries& mid, const PriceMoveSeries& moves, double start, double end) {
    TrainingSlice out;
    out.mid.session_id = mid.session_id;
    out.mid.horizon = end - start;
    out.mid.points.push_back({0.0, lob::mid_at(mid, start)});
    for (std::size_t i = 1; i < mid.points.size(); ++i) {
        const auto& p = mid.points[i];
        if (p.time <= start) continue;
        if (p.time >= end) break;
        out.mid.points.push_back({p.time - start, p.mid});
    }
    std::vector<PriceMove> kept;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        const auto& m = moves[i];
        if (m.time <= start) continue;
        if (m.time >= end) break;
        kept.push_back({m.time - start, m.delta});
    }
    out.moves = PriceMoveSeries(std::move(kept), moves.tick());
    return out;
}

} // namespace

BacktestReport walk_forward(const lob::MidSeries& mid, const PriceMoveSeries& moves, const PredictConfig& config,
                            std::span<const ModelKind> kinds, const CalibrationOptions& calibration) {
    config.validate();
    if (mid.points.empty()) throw Error(ErrorCode::InsufficientData, "walk_forward: empty mid series");
    if (mid.horizon < config.train_len + config.test_len) {
        throw Error(ErrorCode::InsufficientData, "walk_forward: session shorter than train + test");
    }
    BacktestReport report;
    report.config = config;
    report.session_id = mid.session_id;

    const std::size_t windows = walk_forward_windows(mid.horizon, config);
    for (std::size_t w = 0; w < windows; ++w) {
        const double start = static_cast<double>(w) * config.step;
        const double train_end = start + config.train_len;
        const double test_end = train_end + config.test_len;
        const std::uint64_t seed = derive_seed(config.seed, w);
        try {
            const TrainingSlice slice = slice_training(mid, moves, start, train_end);
            if (slice.moves.empty()) throw Error(ErrorCode::TooFewEvents, "no price moves in training window");
            const FitReport fit = select_model(slice.mid, slice.moves, kinds, calibration);
            const KindFit& best = fit.best();
            const GchpModel& model = *best.model;

            WindowRecord r;
            r.window = w;
            r.start = start;
            r.train_end = train_end;
            r.test_end = test_end;
            r.kind = model.kind;
            r.error_rate = best.regression->error_rate;
            r.lambda0 = model.hawkes.lambda0();
            r.alpha = model.hawkes.alpha();
            r.beta = model.hawkes.beta();
            r.a_star = model.limits.a_star;
            r.sigma_star = model.limits.sigma_star;
            r.sigma_bar = model.limits.sigma_bar;
            r.last_state = model.space.classify(slice.moves[slice.moves.size() - 1].delta);
            r.s0 = lob::mid_at(mid, train_end);
            r.s_true = lob::mid_at(mid, test_end);

            switch (config.method) {
            case PredictMethod::DiffusiveMean:
                r.s_pred = predict_diffusive_mean(model, r.s0, config.test_len);
                break;
            case PredictMethod::DiffusiveNoisy:
                r.s_pred = predict_diffusive_noisy(model, r.s0, config.test_len, config.draws, seed);
                break;
            case PredictMethod::JumpDiffusionNoisy:
                r.s_pred = predict_jump_diffusion_noisy(model, r.s0, config.test_len, config.draws, seed);
                break;
            case PredictMethod::MonteCarlo: {
                auto mc = predict_monte_carlo(model, r.s0, r.last_state, config.test_len, config.paths, seed);
                r.s_pred = mc.mean;
                if (config.keep_endpoints) r.endpoints = std::move(mc.endpoints);
                break;
            }
            }
            r.delta_true = r.s_true - r.s0;
            r.delta_pred = r.s_pred - r.s0;
            r.true3 = classify3(r.delta_true, config.alpha3);
            r.pred3 = classify3(r.delta_pred, config.alpha3);
            r.true2 = classify2(r.delta_true, config.alpha2);
            r.pred2 = classify2(r.delta_pred, config.alpha2);
            ++report.confusion3[static_cast<std::size_t>(r.true3)][static_cast<std::size_t>(r.pred3)];
            ++report.confusion2[static_cast<std::size_t>(r.true2)][static_cast<std::size_t>(r.pred2)];
            report.records.push_back(std::move(r));
        } catch (const Error& e) {
            report.skipped.push_back({w, start, e.what()});
        }
    }
    return report;
}

BacktestReport merge_reports(std::span<const BacktestReport> reports) {
    BacktestReport out;
    if (reports.empty()) return out;
    out.config = reports.front().config;
    out.session_id = reports.front().session_id;
    for (const auto& r : reports) {
        out.records.insert(out.records.end(), r.records.begin(), r.records.end());
        out.skipped.insert(out.skipped.end(), r.skipped.begin(), r.skipped.end());
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) out.confusion3[i][j] += r.confusion3[i][j];
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) out.confusion2[i][j] += r.confusion2[i][j];
    }
    return out;
}

namespace {

template <std::size_t K>
void fill_rates(const std::array<std::array<std::size_t, K>, K>& m, std::array<std::optional<double>, K>& recall,
                double& accuracy) {
    std::size_t total = 0;
    std::size_t diag = 0;
    for (std::size_t i = 0; i < K; ++i) {
        const std::size_t row = std::accumulate(m[i].begin(), m[i].end(), std::size_t{0});
        total += row;
        diag += m[i][i];
        if (row > 0) recall[i] = static_cast<double>(m[i][i]) / static_cast<double>(row);
    }
    accuracy = total > 0 ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
}

} // namespace

MetricsSummary report_metrics(const BacktestReport& report, std::size_t bins) {
    if (report.records.empty()) throw Error(ErrorCode::EmptyReport, "no scored windows");
    MetricsSummary s;
    s.scored = report.records.size();
    fill_rates(report.confusion3, s.recall3, s.accuracy3);
    fill_rates(report.confusion2, s.recall2, s.accuracy2);

    std::vector<double> errors;
    errors.reserve(s.scored);
    for (const auto& r : report.records) errors.push_back(r.s_pred - r.s_true);
    const double n = static_cast<double>(errors.size());
    s.error_mean = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
    if (errors.size() > 1) {
        double ss = 0.0;
        for (double e : errors) ss += (e - s.error_mean) * (e - s.error_mean);
        s.error_std = std::sqrt(ss / (n - 1.0));
    }
    s.histogram = diagnostics::histogram(errors, bins);
    return s;
}

} // namespace gchp
