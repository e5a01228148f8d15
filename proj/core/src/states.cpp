#include "gchp/states.hpp"

#include "gchp/error.hpp"
#include "gchp/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gchp {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::DO: return "DO";
        case ModelKind::TwoSDO: return "2SDO";
        case ModelKind::FourDO: return "4DO";
        case ModelKind::NSDO: return "NSDO";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name) {
    std::string key;
    for (char c : name) key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (key.rfind("GCHP", 0) == 0) key.erase(0, 4);
    if (key == "DO") return ModelKind::DO;
    if (key == "2SDO" || key == "TWOSDO") return ModelKind::TwoSDO;
    if (key == "4DO" || key == "FOURDO") return ModelKind::FourDO;
    if (key == "NSDO") return ModelKind::NSDO;
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

std::vector<ModelKind> all_model_kinds() {
    return {ModelKind::DO, ModelKind::TwoSDO, ModelKind::FourDO, ModelKind::NSDO};
}

PriceMoveSeries::PriceMoveSeries(std::vector<PriceMove> moves, double tick)
    : moves_(std::move(moves)), tick_(tick) {
    if (!(tick > 0.0) || !std::isfinite(tick)) throw std::invalid_argument("PriceMoveSeries: tick must be positive");
    const double half = tick / 2.0;
    for (std::size_t i = 0; i < moves_.size(); ++i) {
        const auto& m = moves_[i];
        if (!std::isfinite(m.time) || !std::isfinite(m.delta)) {
            throw std::invalid_argument("PriceMoveSeries: non-finite move");
        }
        if (m.delta == 0.0) throw Error(ErrorCode::ZeroDelta, "price move " + std::to_string(i) + " is zero");
        if (i > 0 && !(m.time > moves_[i - 1].time)) {
            throw std::invalid_argument("PriceMoveSeries: move times must be strictly increasing");
        }
        const double units = m.delta / half;
        if (std::abs(units - std::round(units)) > 1e-6) {
            throw std::invalid_argument("PriceMoveSeries: move " + std::to_string(m.delta) +
                                        " is not a multiple of half a tick");
        }
    }
}

std::int64_t PriceMoveSeries::half_ticks(std::size_t i) const {
    return std::llround(moves_.at(i).delta / (tick_ / 2.0));
}

std::vector<double> PriceMoveSeries::times() const {
    std::vector<double> out;
    out.reserve(moves_.size());
    for (const auto& m : moves_) out.push_back(m.time);
    return out;
}

std::vector<double> PriceMoveSeries::deltas() const {
    std::vector<double> out;
    out.reserve(moves_.size());
    for (const auto& m : moves_) out.push_back(m.delta);
    return out;
}

StateSpace::StateSpace(ModelKind kind, double tick, std::vector<double> values,
                       std::vector<double> up_cuts, std::vector<double> down_cuts)
    : kind_(kind), tick_(tick), values_(std::move(values)), up_cuts_(std::move(up_cuts)),
      down_cuts_(std::move(down_cuts)) {
    if (!(tick > 0.0)) throw std::invalid_argument("StateSpace: tick must be positive");
    if (values_.size() != up_cuts_.size() + down_cuts_.size() + 2) {
        throw std::invalid_argument("StateSpace: value count does not match bucket count");
    }
    auto ascending = [](const std::vector<double>& cuts) {
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            if (!(cuts[i] > 0.0) || (i > 0 && !(cuts[i] > cuts[i - 1]))) return false;
        }
        return true;
    };
    if (!ascending(up_cuts_) || !ascending(down_cuts_)) {
        throw std::invalid_argument("StateSpace: cuts must be positive and strictly ascending");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const bool up = i < up_states();
        if (up ? !(values_[i] > 0.0) : !(values_[i] < 0.0)) {
            throw std::invalid_argument("StateSpace: upward states need positive values, downward negative");
        }
        if (i > 0 && !(values_[i] < values_[i - 1])) {
            throw std::invalid_argument("StateSpace: values must be strictly descending");
        }
    }
}

std::size_t StateSpace::classify(double delta) const {
    if (delta == 0.0) throw Error(ErrorCode::ZeroDelta, "cannot classify a zero price move");
    const double magnitude = std::abs(delta);
    if (delta > 0.0) {
        const auto bucket =
            static_cast<std::size_t>(std::upper_bound(up_cuts_.begin(), up_cuts_.end(), magnitude) - up_cuts_.begin());
        return up_states() - 1 - bucket;
    }
    const auto bucket =
        static_cast<std::size_t>(std::upper_bound(down_cuts_.begin(), down_cuts_.end(), magnitude) - down_cuts_.begin());
    return up_states() + bucket;
}

namespace {

std::size_t bucket_of(const std::vector<double>& cuts, double magnitude) {
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), magnitude) - cuts.begin());
}

// Removes cuts until every bucket holds at least one magnitude. An empty
// bucket is merged into the bucket below it (or above, for the lowest one).
void merge_empty_buckets(std::vector<double>& cuts, const std::vector<double>& magnitudes) {
    while (!cuts.empty()) {
        std::vector<std::size_t> counts(cuts.size() + 1, 0);
        for (double m : magnitudes) ++counts[bucket_of(cuts, m)];
        const auto empty = std::find(counts.begin(), counts.end(), std::size_t{0});
        if (empty == counts.end()) return;
        const auto j = static_cast<std::size_t>(empty - counts.begin());
        cuts.erase(cuts.begin() + static_cast<std::ptrdiff_t>(j > 0 ? j - 1 : 0));
    }
}

// Linear-interpolation sample quantile of a sorted sample (numpy's default).
double sample_quantile(const std::vector<double>& sorted, double level) {
    const double position = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(position));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = position - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> quantile_cuts(std::vector<double> magnitudes, std::size_t buckets) {
    std::sort(magnitudes.begin(), magnitudes.end());
    std::vector<double> cuts;
    for (std::size_t j = 1; j < buckets; ++j) {
        const double q = sample_quantile(magnitudes, static_cast<double>(j) / static_cast<double>(buckets));
        if (cuts.empty() || q > cuts.back()) cuts.push_back(q);
    }
    // A cut at or below the smallest magnitude leaves an empty bottom bucket.
    return cuts;
}

// Mean signed delta per bucket, in series order.
std::vector<double> bucket_means(const PriceMoveSeries& moves, const std::vector<double>& cuts, bool up) {
    std::vector<double> sums(cuts.size() + 1, 0.0);
    std::vector<std::size_t> counts(cuts.size() + 1, 0);
    for (const auto& m : moves.moves()) {
        if ((m.delta > 0.0) != up) continue;
        const auto b = bucket_of(cuts, std::abs(m.delta));
        sums[b] += m.delta;
        ++counts[b];
    }
    std::vector<double> means(sums.size());
    for (std::size_t b = 0; b < sums.size(); ++b) means[b] = sums[b] / static_cast<double>(counts[b]);
    return means;
}

} // namespace

StateSpace build_state_space(const PriceMoveSeries& moves, ModelKind kind, std::optional<std::size_t> states) {
    std::vector<double> up_magnitudes;
    std::vector<double> down_magnitudes;
    for (const auto& m : moves.moves()) {
        (m.delta > 0.0 ? up_magnitudes : down_magnitudes).push_back(std::abs(m.delta));
    }
    if (up_magnitudes.empty() || down_magnitudes.empty()) {
        throw Error(ErrorCode::OneSidedData, std::string(to_string(kind)) + " state space needs both upward (" +
                                                 std::to_string(up_magnitudes.size()) + ") and downward (" +
                                                 std::to_string(down_magnitudes.size()) + ") moves");
    }
    const double tick = moves.tick();

    if (kind == ModelKind::DO) return StateSpace(kind, tick, {tick, -tick}, {}, {});

    std::vector<double> up_cuts;
    std::vector<double> down_cuts;
    switch (kind) {
        case ModelKind::TwoSDO:
            break;
        case ModelKind::FourDO:
            // ">= one tick" vs "< one tick"; the slack absorbs representation
            // error in deltas such as 0.01.
            up_cuts = {tick * (1.0 - 1e-9)};
            down_cuts = up_cuts;
            break;
        case ModelKind::NSDO: {
            const std::size_t n = states.value_or(kDefaultNsdoStates);
            if (n < 2 || n % 2 != 0) throw std::invalid_argument("NSDO state count must be even and >= 2");
            up_cuts = quantile_cuts(up_magnitudes, n / 2);
            down_cuts = quantile_cuts(down_magnitudes, n / 2);
            break;
        }
        case ModelKind::DO:
            break;
    }
    merge_empty_buckets(up_cuts, up_magnitudes);
    merge_empty_buckets(down_cuts, down_magnitudes);

    const auto up_means = bucket_means(moves, up_cuts, true);
    const auto down_means = bucket_means(moves, down_cuts, false);
    std::vector<double> values(up_means.rbegin(), up_means.rend());
    values.insert(values.end(), down_means.begin(), down_means.end());
    return StateSpace(kind, tick, std::move(values), std::move(up_cuts), std::move(down_cuts));
}

std::size_t classify_move(const StateSpace& space, double delta) { return space.classify(delta); }

std::vector<std::size_t> classify_moves(const StateSpace& space, const PriceMoveSeries& moves) {
    std::vector<std::size_t> out;
    out.reserve(moves.size());
    for (const auto& m : moves.moves()) out.push_back(space.classify(m.delta));
    return out;
}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd probabilities)
    : TransitionMatrix(probabilities, Eigen::MatrixXd::Zero(probabilities.rows(), probabilities.cols())) {}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd probabilities, Eigen::MatrixXd counts)
    : probabilities_(std::move(probabilities)), counts_(std::move(counts)) {
    if (probabilities_.rows() == 0 || probabilities_.rows() != probabilities_.cols()) {
        throw std::invalid_argument("TransitionMatrix: must be square and non-empty");
    }
    if (counts_.rows() != probabilities_.rows() || counts_.cols() != probabilities_.cols()) {
        throw std::invalid_argument("TransitionMatrix: counts shape mismatch");
    }
    for (Eigen::Index i = 0; i < probabilities_.rows(); ++i) {
        for (Eigen::Index j = 0; j < probabilities_.cols(); ++j) {
            const double p = probabilities_(i, j);
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("TransitionMatrix: entries must lie in [0,1]");
        }
        if (std::abs(probabilities_.row(i).sum() - 1.0) > 1e-12) {
            throw std::invalid_argument("TransitionMatrix: row " + std::to_string(i) + " does not sum to 1");
        }
    }
}

TransitionMatrix estimate_transition_matrix(std::span<const std::size_t> states, std::size_t n) {
    if (n == 0) throw std::invalid_argument("estimate_transition_matrix: n must be positive");
    if (states.size() < 2) throw std::invalid_argument("estimate_transition_matrix: need at least 2 states");
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(size, size);
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k] >= n) throw std::out_of_range("estimate_transition_matrix: state index out of range");
        if (k > 0) counts(static_cast<Eigen::Index>(states[k - 1]), static_cast<Eigen::Index>(states[k])) += 1.0;
    }
    Eigen::MatrixXd P(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        const double total = counts.row(i).sum();
        if (total == 0.0) {
            P.row(i).setConstant(1.0 / static_cast<double>(n));
        } else {
            P.row(i) = counts.row(i) / total;
        }
    }
    return TransitionMatrix(std::move(P), std::move(counts));
}

StationaryDistribution stationary_distribution(const TransitionMatrix& transition) {
    constexpr long kMaxIterations = 1'000'000;
    constexpr double kTolerance = 1e-12;
    constexpr double kAgreement = 1e-8;

    const Eigen::MatrixXd& P = transition.probabilities();
    const Eigen::Index n = P.rows();

    // A non-uniform start: from the uniform vector a periodic chain with a
    // uniform invariant law would look converged after one step.
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::LinSpaced(n, 1.0, static_cast<double>(n));
    pi /= pi.sum();
    long iterations = 0;
    bool converged = false;
    while (iterations < kMaxIterations) {
        Eigen::RowVectorXd next = pi * P;
        next /= next.sum();
        ++iterations;
        const double change = (next - pi).cwiseAbs().maxCoeff();
        pi = std::move(next);
        if (change < kTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw Error(ErrorCode::NonConvergent,
                    "power iteration did not settle after " + std::to_string(kMaxIterations) +
                        " steps (periodic chain?)");
    }

    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::NonConvergent, "stationary distribution is not unique (reducible chain)");
    }
    Eigen::VectorXd solved = lu.solve(rhs);
    solved = solved.cwiseMax(0.0);
    solved /= solved.sum();

    const double disagreement = (solved - pi.transpose()).cwiseAbs().maxCoeff();
    if (disagreement > kAgreement) {
        throw Error(ErrorCode::NonConvergent,
                    "power iteration and linear solve disagree by " + std::to_string(disagreement));
    }
    return StationaryDistribution{std::move(solved), iterations, disagreement};
}

std::size_t next_state(const TransitionMatrix& P, std::size_t state, double u) {
    const auto row = static_cast<Eigen::Index>(state);
    const Eigen::Index n = P.probabilities().cols();
    double cumulative = 0.0;
    Eigen::Index last_positive = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double p = P.probabilities()(row, j);
        if (p <= 0.0) continue;
        last_positive = j;
        cumulative += p;
        if (u < cumulative) return static_cast<std::size_t>(j);
    }
    return static_cast<std::size_t>(last_positive);
}

std::vector<std::size_t> simulate_chain(const TransitionMatrix& P, std::size_t initial, std::size_t steps,
                                        std::uint64_t seed) {
    if (initial >= P.size()) throw std::out_of_range("simulate_chain: initial state out of range");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> path;
    path.reserve(steps);
    std::size_t state = initial;
    for (std::size_t k = 0; k < steps; ++k) {
        state = next_state(P, state, unit(rng));
        path.push_back(state);
    }
    return path;
}

} // namespace gchp
