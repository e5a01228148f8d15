#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gchp {

// The four mid-price model variants. They differ only in how a price move is
// mapped to a Markov state and that state's value a(i).
enum class ModelKind {
    DO,     // fixed +tick / -tick
    TwoSDO, // mean up move / mean down move
    FourDO, // half-tick and one-tick buckets per side
    NSDO,   // per-sign quantile buckets
};

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
// Accepts "DO", "2SDO", "4DO", "NSDO" and the "GCHP"-prefixed names, case-insensitive.
[[nodiscard]] ModelKind parse_model_kind(std::string_view name);
[[nodiscard]] std::vector<ModelKind> all_model_kinds();

struct PriceMove {
    double time;
    double delta;
};

// Nonzero mid-price moves on a half-tick grid, strictly increasing in time.
class PriceMoveSeries {
public:
    PriceMoveSeries() = default;
    PriceMoveSeries(std::vector<PriceMove> moves, double tick);

    [[nodiscard]] std::span<const PriceMove> moves() const noexcept { return moves_; }
    [[nodiscard]] double tick() const noexcept { return tick_; }
    [[nodiscard]] std::size_t size() const noexcept { return moves_.size(); }
    [[nodiscard]] bool empty() const noexcept { return moves_.empty(); }
    [[nodiscard]] const PriceMove& operator[](std::size_t i) const { return moves_[i]; }

    // Move i expressed as an exact count of half ticks.
    [[nodiscard]] std::int64_t half_ticks(std::size_t i) const;
    [[nodiscard]] std::vector<double> times() const;
    [[nodiscard]] std::vector<double> deltas() const;

private:
    std::vector<PriceMove> moves_;
    double tick_{0.0};
};

// Partition of the nonzero reals into states. Each sign is cut into
// magnitude buckets [c_j, c_{j+1}); a magnitude equal to a cut goes to the
// bucket above it. States are ordered by value, most positive first.
class StateSpace {
public:
    // up_cuts / down_cuts are ascending magnitudes strictly between buckets;
    // values has (up_cuts.size()+1) positive entries followed by
    // (down_cuts.size()+1) negative entries, strictly descending.
    StateSpace(ModelKind kind, double tick, std::vector<double> values,
               std::vector<double> up_cuts, std::vector<double> down_cuts);

    [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
    [[nodiscard]] double tick() const noexcept { return tick_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double value(std::size_t state) const { return values_.at(state); }
    [[nodiscard]] std::span<const double> up_cuts() const noexcept { return up_cuts_; }
    [[nodiscard]] std::span<const double> down_cuts() const noexcept { return down_cuts_; }
    [[nodiscard]] std::size_t up_states() const noexcept { return up_cuts_.size() + 1; }

    // 0-based state index of a nonzero move; Error(ZeroDelta) for 0.
    [[nodiscard]] std::size_t classify(double delta) const;

private:
    ModelKind kind_;
    double tick_;
    std::vector<double> values_;
    std::vector<double> up_cuts_;
    std::vector<double> down_cuts_;
};

inline constexpr std::size_t kDefaultNsdoStates = 8;

// Builds the state space of `kind` from training moves. `states` is only read
// for NSDO (even, >= 2; half per sign). Empty buckets are merged into their
// neighbour so every state has at least one training move.
[[nodiscard]] StateSpace build_state_space(const PriceMoveSeries& moves, ModelKind kind,
                                           std::optional<std::size_t> states = std::nullopt);

[[nodiscard]] std::size_t classify_move(const StateSpace& space, double delta);
[[nodiscard]] std::vector<std::size_t> classify_moves(const StateSpace& space, const PriceMoveSeries& moves);

class TransitionMatrix {
public:
    // Validates a row-stochastic matrix (entries in [0,1], rows sum to 1 within 1e-12).
    explicit TransitionMatrix(Eigen::MatrixXd probabilities);
    TransitionMatrix(Eigen::MatrixXd probabilities, Eigen::MatrixXd counts);

    [[nodiscard]] const Eigen::MatrixXd& probabilities() const noexcept { return probabilities_; }
    // Observed transition counts; zero when built directly from probabilities.
    [[nodiscard]] const Eigen::MatrixXd& counts() const noexcept { return counts_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(probabilities_.rows()); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return probabilities_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXd probabilities_;
    Eigen::MatrixXd counts_;
};

// P(i,j) = count(i->j) / count(i->.); unobserved rows become uniform.
[[nodiscard]] TransitionMatrix estimate_transition_matrix(std::span<const std::size_t> states, std::size_t n);

struct StationaryDistribution {
    Eigen::VectorXd pi;
    // Power-iteration steps taken and the power/linear-solve disagreement (inf-norm).
    long iterations{0};
    double cross_check{0.0};
};

// Power iteration of pi <- pi P from pi_i ~ i+1 (tolerance 1e-12,
// at most 1e6 steps) cross-checked against a direct solve of
// (P^T - I) pi = 0, sum(pi) = 1. Throws Error(NonConvergent) if the iteration
// stalls or the solve has no unique solution.
[[nodiscard]] StationaryDistribution stationary_distribution(const TransitionMatrix& P);

// k successive states after `initial`, each drawn from the row of the previous state.
[[nodiscard]] std::vector<std::size_t> simulate_chain(const TransitionMatrix& P, std::size_t initial,
                                                      std::size_t steps, std::uint64_t seed);

// Draws the successor of `state` from row `state` of P using one uniform u in [0,1).
[[nodiscard]] std::size_t next_state(const TransitionMatrix& P, std::size_t state, double u);

} // namespace gchp
