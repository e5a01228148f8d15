#pragma once

#include "gchp/hawkes.hpp"
#include "gchp/limits.hpp"
#include "gchp/lob.hpp"
#include "gchp/states.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gchp {

// A fitted compound Hawkes mid-price model: Hawkes arrivals plus a Markov
// chain over price-move states.
struct GchpModel {
    ModelKind kind;
    HawkesParams hawkes;
    StateSpace space;
    TransitionMatrix P;
    StationaryDistribution pi;
    LimitParams limits;
};

enum class ErrorRateFormula {
    // |sqrt(c) - sigma sqrt(lambda/(1-mu))| / sqrt(c)
    DerivationConsistent,
    // |sqrt(c) - sigma* sqrt(lambda/(1-mu))| / sqrt(c), which counts the rate factor twice
    Printed,
};

inline const std::vector<double> kDefaultWindowSizes{30.0, 60.0, 120.0, 300.0, 600.0, 1200.0};

struct CalibrationOptions {
    FitConfig hawkes;
    std::size_t nsdo_states{kDefaultNsdoStates};
    std::size_t min_events{50};
    std::vector<double> window_sizes{kDefaultWindowSizes};
    std::size_t min_windows{10};
    ErrorRateFormula formula{ErrorRateFormula::DerivationConsistent};
};

// Builds state space, transition matrix, stationary law and limit parameters
// of `kind` around an already fitted Hawkes process.
[[nodiscard]] GchpModel assemble_gchp(const PriceMoveSeries& moves, ModelKind kind, const HawkesParams& hawkes,
                                      std::size_t nsdo_states = kDefaultNsdoStates);

// Full fit of one kind on one window. Errors are re-raised with the kind in
// the message: TooFewEvents (below options.min_events), OneSidedData,
// NonConvergent, NonStationaryFit, SingularFundamentalMatrix.
[[nodiscard]] GchpModel fit_gchp(const lob::MidSeries& mid, const PriceMoveSeries& moves, ModelKind kind,
                                 const CalibrationOptions& options = {});

struct DeviationPoint {
    double window{0.0};      // n, seconds
    std::size_t windows{0};  // number of disjoint [i n, (i+1) n] blocks
    double std_dev{0.0};     // sample std of S*_i
};

struct SkippedWindowSize {
    double window{0.0};
    std::string reason;
};

struct DeviationCurve {
    std::vector<DeviationPoint> points;
    std::vector<SkippedWindowSize> skipped;
};

// std of S*_i = S((i+1)n) - S(in) - (N((i+1)n) - N(in)) a_star over disjoint
// blocks, for each window size n. Sizes with fewer than `min_windows` blocks
// are skipped as WindowTooLarge.
[[nodiscard]] DeviationCurve window_deviations(const lob::MidSeries& mid, const EventSeries& events, double a_star,
                                               std::span<const double> window_sizes, std::size_t min_windows = 10);

struct RegressionResult {
    double c{0.0};           // zero-intercept slope of std^2 on n
    double theoretical{0.0}; // model coefficient compared against sqrt(c)
    double error_rate{0.0};
};

[[nodiscard]] RegressionResult regression_error_rate(const DeviationCurve& curve, const LimitParams& limits,
                                                     const HawkesParams& hawkes,
                                                     ErrorRateFormula formula = ErrorRateFormula::DerivationConsistent);

struct KindFit {
    ModelKind kind;
    std::optional<GchpModel> model;
    DeviationCurve curve;
    std::optional<RegressionResult> regression;
    std::string error; // empty on success

    [[nodiscard]] bool ok() const noexcept { return model.has_value() && regression.has_value(); }
};

struct FitReport {
    std::optional<HawkesFit> hawkes;
    std::size_t events{0};
    double horizon{0.0};
    std::vector<KindFit> kinds;
    ModelKind chosen{ModelKind::DO};

    [[nodiscard]] const KindFit& best() const;
};

// Fits every kind on a shared Hawkes fit and window grid and picks the one
// with the smallest error rate. Throws Error(AllKindsFailed) if none fits.
[[nodiscard]] FitReport select_model(const lob::MidSeries& mid, const PriceMoveSeries& moves,
                                     std::span<const ModelKind> kinds, const CalibrationOptions& options = {});

} // namespace gchp
