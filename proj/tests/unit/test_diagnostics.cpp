#include <gchp/diagnostics.hpp>
#include <gchp/error.hpp>
#include <gchp/hawkes.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace gchp::diagnostics;
using gchp::EventSeries;
using gchp::HawkesParams;

namespace {

const DistributionFit& find(const std::vector<DistributionFit>& fits, Family f) {
    return *std::find_if(fits.begin(), fits.end(), [&](const auto& x) { return x.family == f; });
}

EventSeries shifted(const EventSeries& e, double c) {
    std::vector<double> t(e.times().begin(), e.times().end());
    for (double& x : t) x += c;
    return EventSeries(std::move(t), e.horizon() + c);
}

} // namespace

TEST(WindowCounts, DirectCount) {
    const auto w = window_counts(EventSeries({1, 2, 3}, 10), 5);
    EXPECT_EQ(w.counts, (std::vector<std::size_t>{3, 0}));
    EXPECT_TRUE(window_counts(EventSeries({1, 2}, 10), 11).counts.empty());
    EXPECT_THROW((void)window_counts(EventSeries({}, 10), 0.0), std::invalid_argument);
}

TEST(WindowCounts, TotalsMatchCoveredEvents) {
    const auto e = gchp::simulate(HawkesParams(1.0, 0.4, 1.0), 1005.0, 3);
    const auto w = window_counts(e, 10.0);
    EXPECT_EQ(w.counts.size(), 100u);
    EXPECT_EQ(std::accumulate(w.counts.begin(), w.counts.end(), std::size_t{0}), e.count_until(999.999999));
}

TEST(WindowCounts, PoissonMean) {
    const auto w = window_counts(gchp::simulate(HawkesParams(2.0, 0.0, 1.0), 1e4, 8), 10.0);
    const double mean = std::accumulate(w.counts.begin(), w.counts.end(), 0.0) / static_cast<double>(w.counts.size());
    EXPECT_NEAR(mean, 20.0, 1.0);
}

TEST(Fits, TooFewSamples) {
    try {
        (void)fit_distributions(std::vector<double>{1, 2, 3});
        FAIL();
    } catch (const gchp::Error& e) {
        EXPECT_EQ(e.code(), gchp::ErrorCode::TooFewSamples);
    }
}

TEST(Fits, ExponentialSampleRanksExponentialFirst) {
    std::mt19937_64 rng(12);
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> x(100'000);
    for (double& v : x) v = ex(rng);
    const auto fits = fit_distributions(x);
    ASSERT_EQ(fits.size(), 5u);
    // Gamma and Weibull nest the exponential, so the top three can tie closely;
    // the exponential must be best or within sampling noise of the best.
    EXPECT_LT(find(fits, Family::Exponential).ks_distance, fits.front().ks_distance + 1e-3);
    EXPECT_NEAR(find(fits, Family::Exponential).first, 1.0, 0.02);
    for (std::size_t i = 1; i < fits.size(); ++i) EXPECT_LE(fits[i - 1].ks_distance, fits[i].ks_distance);
    for (const auto& f : fits) {
        EXPECT_GE(f.ks_distance, 0.0);
        EXPECT_LE(f.ks_distance, 1.0);
    }
}

TEST(Fits, GammaAndWeibullRecoverShape) {
    std::mt19937_64 rng(13);
    std::gamma_distribution<double> g(2.5, 0.4);
    std::weibull_distribution<double> w(0.7, 3.0);
    std::vector<double> xg(50'000), xw(50'000);
    for (double& v : xg) v = g(rng);
    for (double& v : xw) v = w(rng);
    const auto fg = find(fit_distributions(xg), Family::Gamma);
    EXPECT_NEAR(fg.first, 2.5, 0.08);
    EXPECT_NEAR(fg.second, 0.4, 0.015);
    const auto fw = find(fit_distributions(xw), Family::Weibull);
    EXPECT_NEAR(fw.first, 0.7, 0.01);
    EXPECT_NEAR(fw.second, 3.0, 0.06);
    EXPECT_EQ(fit_distributions(xg).front().family, Family::Gamma);
    EXPECT_EQ(fit_distributions(xw).front().family, Family::Weibull);
}

TEST(Fits, WaldClosedForm) {
    std::vector<double> x{0.5, 1.0, 1.5, 2.0, 0.7, 1.2, 0.9, 3.0, 0.4, 1.1};
    const auto f = find(fit_distributions(x), Family::Wald);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double inv = 0.0;
    for (double v : x) inv += 1.0 / v - 1.0 / mean;
    EXPECT_NEAR(f.first, mean, 1e-12);
    EXPECT_NEAR(f.second, x.size() / inv, 1e-9);
}

TEST(Fits, HawkesInterarrivalsAreNotExponential) {
    const auto e = gchp::simulate(HawkesParams(1.0, 0.5, 1.0), 1e5, 21);
    const auto fits = fit_interarrival_distributions(e);
    EXPECT_NE(fits.front().family, Family::Exponential);
}

TEST(Fits, ConstantGapsHitShapeCap) {
    std::vector<double> t;
    for (int i = 0; i < 50; ++i) t.push_back(i * 2.0);
    std::vector<DistributionFit> fits;
    ASSERT_NO_THROW(fits = fit_interarrival_distributions(EventSeries(t, 100.0)));
    for (const auto& f : fits) {
        EXPECT_TRUE(std::isfinite(f.first) && std::isfinite(f.second)) << to_string(f.family);
        if (f.family == Family::Gamma || f.family == Family::Weibull) {
            EXPECT_LE(f.first, kShapeMax);
            EXPECT_GE(f.first, kShapeMin);
        }
    }
}

TEST(Fits, CdfsAreMonotoneAndBounded) {
    std::mt19937_64 rng(14);
    std::lognormal_distribution<double> ln(0.0, 1.0);
    std::vector<double> x(2000);
    for (double& v : x) v = ln(rng);
    const auto fits = fit_distributions(x);
    const auto table = cdf_table(x, fits, 50);
    ASSERT_EQ(table.size(), 50u);
    for (std::size_t r = 1; r < table.size(); ++r) {
        EXPECT_GE(table[r].empirical, table[r - 1].empirical);
        for (std::size_t k = 0; k < fits.size(); ++k) {
            EXPECT_GE(table[r].fitted[k], table[r - 1].fitted[k] - 1e-15);
            EXPECT_GE(table[r].fitted[k], 0.0);
            EXPECT_LE(table[r].fitted[k], 1.0);
        }
    }
    EXPECT_DOUBLE_EQ(table.back().empirical, 1.0);
}

TEST(Autocorrelation, SelfLagIsOne) {
    const auto e = gchp::simulate(HawkesParams(1.0, 0.5, 1.0), 5000.0, 2);
    const std::vector<double> lags{-60.0};
    const auto c = autocorrelation(e, 60.0, lags);
    ASSERT_TRUE(c[0].value.has_value());
    EXPECT_EQ(*c[0].value, 1.0);
}

TEST(Autocorrelation, PoissonWithinNoiseBand) {
    int inside = 0;
    const int trials = 40;
    const std::vector<double> lags{0.0, 60.0};
    for (int s = 0; s < trials; ++s) {
        const auto c = autocorrelation(gchp::simulate(HawkesParams(1.0, 0.0, 1.0), 20'000.0, 300 + s), 60.0, lags);
        bool ok = true;
        for (const auto& l : c) ok = ok && l.value && std::abs(*l.value) < 3.0 / std::sqrt(double(l.pairs));
        inside += ok;
    }
    EXPECT_GE(inside, static_cast<int>(0.9 * trials));
}

TEST(Autocorrelation, SlowHawkesPositiveAtZeroLag) {
    const auto e = gchp::simulate(HawkesParams(0.5, 0.002, 0.004), 1e5, 5);
    const std::vector<double> lags{0.0};
    const auto c = autocorrelation(e, 60.0, lags);
    ASSERT_TRUE(c[0].value.has_value());
    EXPECT_GT(*c[0].value, 3.0 / std::sqrt(double(c[0].pairs)));
}

TEST(Autocorrelation, InvariantUnderOriginShift) {
    const auto e = gchp::simulate(HawkesParams(1.0, 0.5, 1.0), 8000.0, 6);
    const std::vector<double> lags{0.0, 30.0, 120.0};
    const auto a = autocorrelation(e, 60.0, lags);
    const auto b = autocorrelation(shifted(e, 1234.5), 60.0, lags, {1234.5, 30});
    for (std::size_t i = 0; i < lags.size(); ++i) {
        ASSERT_EQ(a[i].pairs, b[i].pairs);
        ASSERT_TRUE(a[i].value && b[i].value);
        EXPECT_NEAR(*a[i].value, *b[i].value, 1e-12);
    }
}

TEST(Autocorrelation, ShortSessionReportsPerLag) {
    const auto e = gchp::simulate(HawkesParams(1.0, 0.5, 1.0), 2000.0, 7);
    const std::vector<double> lags{0.0, 1200.0};
    const auto c = autocorrelation(e, 30.0, lags);
    EXPECT_TRUE(c[0].value.has_value());
    EXPECT_FALSE(c[1].value.has_value());
    EXPECT_NE(c[1].error.find("InsufficientData"), std::string::npos);
}

TEST(Histogram, FixedWidthBins) {
    const std::vector<double> v{0, 1, 2, 3, 4, 10};
    const auto h = histogram(v, 5);
    ASSERT_EQ(h.size(), 5u);
    EXPECT_EQ(h[0].count, 2u);
    EXPECT_EQ(h[4].count, 1u);
    EXPECT_DOUBLE_EQ(h[0].upper - h[0].lower, 2.0);
}
