#include "oracles.hpp"

#include <gchp/calibration.hpp>
#include <gchp/error.hpp>
#include <gchp/synthetic.hpp>

#include <gtest/gtest.h>

#include <cmath>

using gchp::ModelKind;

namespace {

gchp::GchpGenerator four_state_generator() {
    Eigen::Matrix4d P;
    P << 0.3, 0.2, 0.3, 0.2,
         0.25, 0.25, 0.25, 0.25,
         0.2, 0.3, 0.3, 0.2,
         0.2, 0.2, 0.3, 0.3;
    return {gchp::HawkesParams(0.5, 0.5, 1.0), {0.015, 0.005, -0.005, -0.015}, gchp::TransitionMatrix(P), 0,
            100.0, 0.01};
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

gchp::LimitParams limits_with_sigma(double sigma) {
    gchp::LimitParams L;
    L.sigma_sq = sigma * sigma;
    L.sigma_star = sigma;
    return L;
}

gchp::DeviationCurve exact_curve(double c) {
    gchp::DeviationCurve curve;
    for (double n : gchp::kDefaultWindowSizes) curve.points.push_back({n, 20, std::sqrt(c * n)});
    return curve;
}

} // namespace

TEST(FitGchp, RecoversGeneratorMeansForTwoSdo) {
    const auto gen = four_state_generator();
    const auto session = gchp::simulate_gchp(gen, 10'000.0, 3);
    const auto model = gchp::fit_gchp(session.mid, session.moves, ModelKind::TwoSDO);
    const auto pi = gchp::stationary_distribution(gen.P).pi;
    const double up = (pi(0) * 0.015 + pi(1) * 0.005) / (pi(0) + pi(1));
    const double down = (pi(2) * -0.005 + pi(3) * -0.015) / (pi(2) + pi(3));
    EXPECT_NEAR(model.space.value(0) / up, 1.0, 0.05);
    EXPECT_NEAR(model.space.value(1) / down, 1.0, 0.05);
    EXPECT_NEAR(model.hawkes.branching_ratio(), 0.5, 0.1);
    EXPECT_EQ(model.kind, ModelKind::TwoSDO);
}

TEST(FitGchp, FourDoRecoversGeneratorStates) {
    const auto gen = four_state_generator();
    const auto session = gchp::simulate_gchp(gen, 5'000.0, 4);
    const auto model = gchp::assemble_gchp(session.moves, ModelKind::FourDO, gen.hawkes);
    ASSERT_EQ(model.space.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(model.space.value(i), gen.values[i], 1e-12);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(model.P(i, j), gen.P(i, j), 0.05);
}

TEST(FitGchp, TooFewEventsIsTagged) {
    const auto mid = oracle::mid_series(
        {{0, 10.0}, {1, 10.01}, {2, 10.0}, {3, 10.01}, {4, 10.0}, {5, 10.01}, {6, 10.0}, {7, 10.01}, {8, 10.0},
         {9, 10.01}, {10, 10.0}},
        20);
    const auto moves = gchp::lob::price_moves(mid, 0.01);
    try {
        (void)gchp::fit_gchp(mid, moves, ModelKind::NSDO);
        FAIL();
    } catch (const gchp::Error& e) {
        EXPECT_EQ(e.code(), gchp::ErrorCode::TooFewEvents);
        EXPECT_EQ(std::string(e.what()).rfind("TooFewEvents: NSDO: ", 0), 0u) << e.what();
    }
}

TEST(FitGchp, AllUpwardWindowFailsEveryKind) {
    std::vector<gchp::lob::MidPoint> pts{{0, 10.0}};
    for (int i = 1; i <= 200; ++i) pts.push_back({i * 1.7, 10.0 + 0.005 * i});
    const auto mid = oracle::mid_series(pts, 400);
    const auto moves = gchp::lob::price_moves(mid, 0.01);
    for (auto kind : gchp::all_model_kinds()) {
        EXPECT_EQ(code_of([&] { (void)gchp::fit_gchp(mid, moves, kind); }), gchp::ErrorCode::OneSidedData)
            << gchp::to_string(kind);
    }
    const auto kinds = gchp::all_model_kinds();
    EXPECT_EQ(code_of([&] { (void)gchp::select_model(mid, moves, kinds); }), gchp::ErrorCode::AllKindsFailed);
}

TEST(WindowDeviations, ConstantMidIsZero) {
    const auto mid = oracle::mid_series({{0, 10.0}}, 12000);
    const gchp::EventSeries events({}, 12000);
    const auto curve = gchp::window_deviations(mid, events, 0.0, gchp::kDefaultWindowSizes);
    ASSERT_EQ(curve.points.size(), gchp::kDefaultWindowSizes.size());
    for (const auto& p : curve.points) EXPECT_EQ(p.std_dev, 0.0);
    EXPECT_EQ(code_of([&] {
                  (void)gchp::regression_error_rate(curve, limits_with_sigma(1.0), gchp::HawkesParams(1, 0, 1));
              }),
              gchp::ErrorCode::DegenerateCurve);
}

TEST(WindowDeviations, TooLargeWindowsAreSkipped) {
    const auto mid = oracle::mid_series({{0, 10.0}, {5, 10.005}}, 1000);
    const auto events = gchp::lob::event_series(mid);
    const std::vector<double> sizes{50.0, 200.0, 2000.0};
    const auto curve = gchp::window_deviations(mid, events, 0.0, sizes);
    ASSERT_EQ(curve.points.size(), 1u);
    ASSERT_EQ(curve.skipped.size(), 2u);
    EXPECT_NE(curve.skipped[1].reason.find("WindowTooLarge"), std::string::npos);
}

TEST(WindowDeviations, HandComputedBlocks) {
    // Blocks of 10 s over 40 s: mids at 0,10,20,30,40 are 10, 10.01, 10.01, 9.99, 10.
    const auto mid = oracle::mid_series({{0, 10.0}, {4, 10.005}, {7, 10.01}, {25, 9.99}, {33, 10.0}}, 40);
    const auto events = gchp::lob::event_series(mid);
    const std::vector<double> sizes{10.0};
    const double a = 0.002;
    const auto curve = gchp::window_deviations(mid, events, a, sizes, 4);
    ASSERT_EQ(curve.points.size(), 1u);
    const std::vector<double> dev{0.01 - 2 * a, 0.0, -0.02 - a, 0.01 - a};
    double m = 0.0;
    for (double d : dev) m += d / 4;
    double ss = 0.0;
    for (double d : dev) ss += (d - m) * (d - m);
    EXPECT_NEAR(curve.points[0].std_dev, std::sqrt(ss / 3), 1e-14);
}

TEST(WindowDeviations, InvariantUnderPriceShift) {
    const auto session = gchp::simulate_gchp(four_state_generator(), 3000.0, 5);
    auto lifted = session.mid;
    for (auto& p : lifted.points) p.mid += 250.0;
    const auto events = gchp::lob::event_series(session.mid);
    const auto a = gchp::window_deviations(session.mid, events, 0.001, gchp::kDefaultWindowSizes);
    const auto b = gchp::window_deviations(lifted, events, 0.001, gchp::kDefaultWindowSizes);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_NEAR(a.points[i].std_dev, b.points[i].std_dev, 1e-9);
}

TEST(Regression, PerfectAndHalfOff) {
    const gchp::HawkesParams poisson(1.0, 0.0, 1.0);
    const auto perfect = gchp::regression_error_rate(exact_curve(4.0), limits_with_sigma(2.0), poisson);
    EXPECT_NEAR(perfect.c, 4.0, 1e-12);
    EXPECT_NEAR(perfect.error_rate, 0.0, 1e-12);
    const auto off = gchp::regression_error_rate(exact_curve(4.0), limits_with_sigma(1.0), poisson);
    EXPECT_NEAR(off.error_rate, 0.5, 1e-12);
}

TEST(Regression, SelfConsistentCurveHasZeroError) {
    const gchp::HawkesParams h(0.7, 0.3, 0.9);
    const auto L = limits_with_sigma(0.004);
    const double coeff = 0.004 * 0.004 * h.stationary_rate();
    EXPECT_NEAR(gchp::regression_error_rate(exact_curve(coeff), L, h).error_rate, 0.0, 1e-12);
}

TEST(Regression, PrintedFormulaCountsRateTwice) {
    const gchp::HawkesParams h(1.0, 0.5, 1.0);
    gchp::LimitParams L = limits_with_sigma(1.0);
    L.sigma_star = std::sqrt(2.0);
    const auto r = gchp::regression_error_rate(exact_curve(2.0), L, h, gchp::ErrorRateFormula::Printed);
    EXPECT_NEAR(r.theoretical, 2.0, 1e-12);
    EXPECT_NEAR(gchp::regression_error_rate(exact_curve(2.0), L, h).theoretical, std::sqrt(2.0), 1e-12);
}

TEST(Regression, SlopeMatchesGridSearch) {
    gchp::DeviationCurve curve;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> noise(0.7, 1.3);
    for (double n : gchp::kDefaultWindowSizes) curve.points.push_back({n, 20, std::sqrt(3e-5 * n * noise(rng))});
    const double c = gchp::regression_error_rate(curve, limits_with_sigma(1.0), gchp::HawkesParams(1, 0, 1)).c;
    auto loss = [&](double x) {
        double s = 0.0;
        for (const auto& p : curve.points) s += std::pow(p.std_dev * p.std_dev - x * p.window, 2);
        return s;
    };
    // Golden-section refinement of a coarse grid minimum.
    double lo = 0.0, hi = 1e-4;
    for (int k = 0; k < 200; ++k) {
        const double m1 = lo + (hi - lo) * 0.381966, m2 = hi - (hi - lo) * 0.381966;
        (loss(m1) < loss(m2) ? hi : lo) = (loss(m1) < loss(m2) ? m2 : m1);
    }
    EXPECT_NEAR(c, 0.5 * (lo + hi), 1e-8);
}

TEST(SelectModel, SingleKindIsChosen) {
    const auto session = gchp::simulate_gchp(four_state_generator(), 6000.0, 6);
    const std::vector<ModelKind> kinds{ModelKind::FourDO};
    const auto report = gchp::select_model(session.mid, session.moves, kinds);
    EXPECT_EQ(report.chosen, ModelKind::FourDO);
    EXPECT_TRUE(report.best().ok());
    EXPECT_GE(report.best().regression->error_rate, 0.0);
}

TEST(SelectModel, ChoosesMinimumErrorAndKeepsEveryCurve) {
    const auto session = gchp::simulate_gchp(four_state_generator(), 6000.0, 7);
    const auto kinds = gchp::all_model_kinds();
    const auto report = gchp::select_model(session.mid, session.moves, kinds);
    ASSERT_EQ(report.kinds.size(), 4u);
    ASSERT_TRUE(report.hawkes.has_value());
    for (const auto& k : report.kinds) {
        ASSERT_TRUE(k.ok()) << k.error;
        EXPECT_FALSE(k.curve.points.empty());
        EXPECT_GE(k.regression->error_rate, report.best().regression->error_rate);
        EXPECT_EQ(k.model->hawkes, report.hawkes->params);
    }
}
