#include "oracles.hpp"

#include <gchp/error.hpp>
#include <gchp/states.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using gchp::ModelKind;
using gchp::PriceMoveSeries;

namespace {

PriceMoveSeries moves_from(const std::vector<double>& deltas, double tick) {
    std::vector<gchp::PriceMove> m;
    for (std::size_t i = 0; i < deltas.size(); ++i) m.push_back({static_cast<double>(i + 1), deltas[i]});
    return PriceMoveSeries(m, tick);
}

gchp::TransitionMatrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd P(n, n);
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) P(i, j++) = v;
        ++i;
    }
    return gchp::TransitionMatrix(P);
}

gchp::ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const gchp::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no gchp::Error thrown";
    return gchp::ErrorCode::EmptyReport;
}

} // namespace

TEST(ModelKindNames, RoundTrip) {
    for (auto k : gchp::all_model_kinds()) EXPECT_EQ(gchp::parse_model_kind(gchp::to_string(k)), k);
    EXPECT_EQ(gchp::parse_model_kind("gchp2sdo"), ModelKind::TwoSDO);
    EXPECT_EQ(gchp::parse_model_kind("GCHPnSDO"), ModelKind::NSDO);
    EXPECT_THROW((void)gchp::parse_model_kind("5DO"), std::invalid_argument);
}

TEST(PriceMoves, RejectsZeroAndOffGrid) {
    EXPECT_EQ(code_of([] { (void)moves_from({0.01, 0.0}, 0.01); }), gchp::ErrorCode::ZeroDelta);
    EXPECT_THROW(moves_from({0.013}, 0.01), std::invalid_argument);
    EXPECT_THROW(PriceMoveSeries({{1.0, 0.01}, {1.0, -0.01}}, 0.01), std::invalid_argument);
    const auto m = moves_from({0.005, -0.015}, 0.01);
    EXPECT_EQ(m.half_ticks(0), 1);
    EXPECT_EQ(m.half_ticks(1), -3);
}

TEST(StateSpace, DoIsPlusMinusTick) {
    const auto s = gchp::build_state_space(moves_from({0.005, 0.02, -0.01}, 0.01), ModelKind::DO);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_DOUBLE_EQ(s.value(0), 0.01);
    EXPECT_DOUBLE_EQ(s.value(1), -0.01);
    EXPECT_EQ(s.classify(-0.005), 1u);
    EXPECT_EQ(s.classify(0.03), 0u);
}

TEST(StateSpace, TwoSdoMeansBySign) {
    const auto s = gchp::build_state_space(moves_from({0.01, 0.03, -0.02}, 0.01), ModelKind::TwoSDO);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(s.value(0), 0.02, 1e-15);
    EXPECT_NEAR(s.value(1), -0.02, 1e-15);
}

TEST(StateSpace, FourDoBuckets) {
    const auto s =
        gchp::build_state_space(moves_from({0.005, 0.01, 0.02, -0.005, -0.015}, 0.01), ModelKind::FourDO);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_NEAR(s.value(0), 0.015, 1e-15);
    EXPECT_NEAR(s.value(1), 0.005, 1e-15);
    EXPECT_NEAR(s.value(2), -0.005, 1e-15);
    EXPECT_NEAR(s.value(3), -0.015, 1e-15);
    EXPECT_EQ(s.classify(0.01), 0u);
    EXPECT_EQ(s.classify(0.005), 1u);
    EXPECT_EQ(s.classify(-0.005), 2u);
    EXPECT_EQ(s.classify(-0.01), 3u);
}

TEST(StateSpace, FourDoMergesEmptyBucket) {
    // No half-tick up moves: the up side collapses to one state.
    const auto s = gchp::build_state_space(moves_from({0.01, 0.02, -0.005, -0.015}, 0.01), ModelKind::FourDO);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_NEAR(s.value(0), 0.015, 1e-15);
    EXPECT_EQ(s.classify(0.005), 0u);
}

TEST(StateSpace, OneSidedData) {
    for (auto kind : gchp::all_model_kinds()) {
        EXPECT_EQ(code_of([&] { (void)gchp::build_state_space(moves_from({0.01, 0.02}, 0.01), kind); }),
                  gchp::ErrorCode::OneSidedData);
    }
}

TEST(StateSpace, ZeroDeltaRejected) {
    const auto s = gchp::build_state_space(moves_from({0.01, -0.01}, 0.01), ModelKind::TwoSDO);
    EXPECT_EQ(code_of([&] { (void)s.classify(0.0); }), gchp::ErrorCode::ZeroDelta);
}

TEST(StateSpace, NsdoMatchesBruteForceBucketing) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0.0, 4.0);
    std::vector<double> deltas;
    while (deltas.size() < 1000) {
        const double h = std::round(normal(rng));
        if (h != 0.0) deltas.push_back(h * 0.005);
    }
    const auto moves = moves_from(deltas, 0.01);
    const auto space = gchp::build_state_space(moves, ModelKind::NSDO, 4);

    // Brute force: per sign, type-7 quantiles of magnitudes at 1/2, deduped;
    // magnitude m goes to the bucket of the largest cut <= m.
    auto cuts_for = [](std::vector<double> mags) {
        std::sort(mags.begin(), mags.end());
        const double pos = 0.5 * static_cast<double>(mags.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double q = mags[lo] + (pos - lo) * (mags[std::min(lo + 1, mags.size() - 1)] - mags[lo]);
        std::vector<double> cuts;
        if (q > mags.front() && q <= mags.back()) cuts.push_back(q);
        return cuts;
    };
    std::vector<double> up, down;
    for (double d : deltas) (d > 0 ? up : down).push_back(std::abs(d));
    const auto up_cuts = cuts_for(up);
    const auto down_cuts = cuts_for(down);
    std::map<std::pair<int, std::size_t>, std::pair<double, int>> buckets;
    for (double d : deltas) {
        const auto& cuts = d > 0 ? up_cuts : down_cuts;
        const std::size_t b = static_cast<std::size_t>(
            std::upper_bound(cuts.begin(), cuts.end(), std::abs(d)) - cuts.begin());
        auto& acc = buckets[{d > 0 ? 1 : -1, b}];
        acc.first += d;
        acc.second += 1;
    }
    std::vector<double> expected;
    for (const auto& [key, acc] : buckets) expected.push_back(acc.first / acc.second);
    std::sort(expected.begin(), expected.end(), std::greater<>());

    ASSERT_EQ(space.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(space.value(i), expected[i], 1e-15) << i;
}

TEST(StateSpace, EveryKindValuesAreMeansOfTheirMoves) {
    std::mt19937_64 rng(23);
    std::geometric_distribution<int> geo(0.45);
    std::bernoulli_distribution up(0.55);
    std::vector<double> deltas;
    for (int i = 0; i < 2000; ++i) deltas.push_back((up(rng) ? 1 : -1) * (1 + geo(rng)) * 0.005);
    const auto moves = moves_from(deltas, 0.01);
    for (auto kind : {ModelKind::TwoSDO, ModelKind::FourDO, ModelKind::NSDO}) {
        const auto space = gchp::build_state_space(moves, kind);
        std::vector<double> sum(space.size(), 0.0);
        std::vector<int> n(space.size(), 0);
        for (double d : deltas) {
            const auto s = space.classify(d);
            sum[s] += d;
            ++n[s];
        }
        for (std::size_t i = 0; i < space.size(); ++i) {
            ASSERT_GT(n[i], 0) << gchp::to_string(kind) << " state " << i;
            EXPECT_NEAR(space.value(i), sum[i] / n[i], 1e-14) << gchp::to_string(kind) << " state " << i;
            if (i > 0) {
                EXPECT_GT(space.value(i - 1), space.value(i));
            }
        }
    }
}

TEST(Transitions, HandCounts) {
    const std::vector<std::size_t> alt{0, 1, 0, 1, 0};
    const auto a = gchp::estimate_transition_matrix(alt, 2);
    EXPECT_EQ(a.probabilities(), (Eigen::Matrix2d() << 0, 1, 1, 0).finished());

    const std::vector<std::size_t> seq{0, 0, 1, 0};
    const auto b = gchp::estimate_transition_matrix(seq, 2);
    EXPECT_EQ(b.probabilities(), (Eigen::Matrix2d() << 0.5, 0.5, 1, 0).finished());
    EXPECT_EQ(b.counts()(0, 0), 1.0);

    const std::vector<std::size_t> stuck{0, 0, 0};
    const auto c = gchp::estimate_transition_matrix(stuck, 2);
    EXPECT_EQ(c.probabilities(), (Eigen::Matrix2d() << 1, 0, 0.5, 0.5).finished());
}

TEST(Transitions, RejectsNonStochastic) {
    EXPECT_THROW(matrix({{0.5, 0.6}, {0.5, 0.5}}), std::invalid_argument);
    EXPECT_THROW(matrix({{1.5, -0.5}, {0.5, 0.5}}), std::invalid_argument);
}

TEST(Stationary, KnownCases) {
    const auto a = gchp::stationary_distribution(matrix({{0.5, 0.5}, {0.5, 0.5}}));
    EXPECT_NEAR(a.pi(0), 0.5, 1e-12);
    const auto b = gchp::stationary_distribution(matrix({{0.6, 0.4}, {0.3, 0.7}}));
    EXPECT_NEAR(b.pi(0), 3.0 / 7.0, 1e-12);
    EXPECT_NEAR(b.pi(1), 4.0 / 7.0, 1e-12);
    const auto c = gchp::stationary_distribution(matrix({{0.2, 0.3, 0.5}, {0.5, 0.2, 0.3}, {0.3, 0.5, 0.2}}));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(c.pi(i), 1.0 / 3.0, 1e-12);
}

TEST(Stationary, TwoStateFormula) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int k = 0; k < 200; ++k) {
        const double p = u(rng), q = u(rng);
        const auto s = gchp::stationary_distribution(matrix({{1 - p, p}, {q, 1 - q}}));
        EXPECT_NEAR(s.pi(0), q / (p + q), 1e-12);
    }
}

TEST(Stationary, RandomChainsAgreeWithPowersAndFixedPoint) {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
        const int n = 2 + k % 7;
        const Eigen::MatrixXd P = oracle::random_stochastic(n, rng, 0.0);
        const auto s = gchp::stationary_distribution(gchp::TransitionMatrix(P));
        EXPECT_NEAR(s.pi.sum(), 1.0, 1e-12);
        EXPECT_GE(s.pi.minCoeff(), 0.0);
        EXPECT_LT((s.pi.transpose() * P - s.pi.transpose()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((s.pi - oracle::stationary_by_powers(P)).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT(s.cross_check, 1e-10);
    }
}

TEST(Stationary, PeriodicOrReducibleIsNonConvergent) {
    EXPECT_EQ(code_of([] { (void)gchp::stationary_distribution(matrix({{0, 1}, {1, 0}})); }),
              gchp::ErrorCode::NonConvergent);
    EXPECT_EQ(code_of([] { (void)gchp::stationary_distribution(matrix({{1, 0}, {0, 1}})); }),
              gchp::ErrorCode::NonConvergent);
}

TEST(Chain, DeterministicShapes) {
    const auto id = gchp::simulate_chain(matrix({{1, 0}, {0, 1}}), 1, 5, 3);
    EXPECT_EQ(id, (std::vector<std::size_t>{1, 1, 1, 1, 1}));
    const auto alt = gchp::simulate_chain(matrix({{0, 1}, {1, 0}}), 0, 4, 3);
    EXPECT_EQ(alt, (std::vector<std::size_t>{1, 0, 1, 0}));
    EXPECT_TRUE(gchp::simulate_chain(matrix({{0, 1}, {1, 0}}), 0, 0, 3).empty());
}

TEST(Chain, OccupancyConvergesToStationary) {
    const auto P = matrix({{0.6, 0.4}, {0.3, 0.7}});
    const auto path = gchp::simulate_chain(P, 0, 1'000'000, 77);
    const auto zeros = std::count(path.begin(), path.end(), 0u);
    EXPECT_NEAR(static_cast<double>(zeros) / 1e6, 3.0 / 7.0, 0.01);
    EXPECT_EQ(path, gchp::simulate_chain(P, 0, 1'000'000, 77));
}
