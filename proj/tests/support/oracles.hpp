#pragma once

// Reference computations used by the tests. They deliberately avoid the
// library's own recursions so that agreement is evidence, not tautology.

#include <gchp/hawkes.hpp>
#include <gchp/lob.hpp>
#include <gchp/states.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Intensity by direct summation over the whole history.
inline double intensity(double lambda, double alpha, double beta, const std::vector<double>& times, double t) {
    double s = lambda;
    for (double ti : times) {
        if (ti < t) s += alpha * std::exp(-beta * (t - ti));
    }
    return s;
}

// Integral of the intensity by adaptive Gauss-Kronrod on each smooth piece.
inline double compensator(double lambda, double alpha, double beta, const std::vector<double>& times, double T) {
    std::vector<double> knots{0.0};
    for (double t : times) {
        if (t > knots.back() && t < T) knots.push_back(t);
    }
    knots.push_back(T);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double a = knots[k];
        const double b = knots[k + 1];
        // Inside (a, b) the history is fixed: every event at or before a.
        auto f = [&](double u) {
            double s = lambda;
            for (double ti : times) {
                if (ti <= a) s += alpha * std::exp(-beta * (u - ti));
            }
            return s;
        };
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 4, 1e-12, &err);
    }
    return total;
}

inline double log_likelihood(double lambda, double alpha, double beta, const std::vector<double>& times, double T) {
    double s = 0.0;
    for (double t : times) s += std::log(intensity(lambda, alpha, beta, times, t));
    return s - compensator(lambda, alpha, beta, times, T);
}

// E[N(t)] for a stationary-parameter exponential Hawkes process started empty:
// m'(t) = lambda + alpha * int_0^t e^{-beta (t-s)} m'(s) ds, solved in closed form.
inline double expected_count(double lambda, double alpha, double beta, double t) {
    const double k = beta - alpha;
    const double mu = alpha / beta;
    const double Lambda = lambda / (1.0 - mu);
    return Lambda * t - Lambda * mu * (1.0 - std::exp(-k * t)) / k;
}

// Long-run variance of sum b(X_k) from one simulated path: lag-0 variance plus
// twice the autocovariances up to `max_lag`.
inline double chain_long_run_variance(const Eigen::MatrixXd& P, const Eigen::VectorXd& b, std::size_t steps,
                                      std::size_t max_lag, std::uint64_t seed) {
    const auto n = P.rows();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(steps);
    Eigen::Index s = 0;
    for (std::size_t burn = 0; burn < 1000; ++burn) {
        double u = unit(rng);
        Eigen::Index j = 0;
        while (j + 1 < n && u >= P(s, j)) u -= P(s, j++);
        s = j;
    }
    for (std::size_t k = 0; k < steps; ++k) {
        double u = unit(rng);
        Eigen::Index j = 0;
        while (j + 1 < n && u >= P(s, j)) u -= P(s, j++);
        s = j;
        x[k] = b(s);
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(steps);
    for (double& v : x) v -= mean;
    double total = 0.0;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double c = 0.0;
        for (std::size_t k = 0; k + lag < steps; ++k) c += x[k] * x[k + lag];
        c /= static_cast<double>(steps);
        total += lag == 0 ? c : 2.0 * c;
    }
    return total;
}

// Stationary law as a row of lim P^n.
inline Eigen::VectorXd stationary_by_powers(const Eigen::MatrixXd& P) {
    Eigen::MatrixXd M = P;
    for (int k = 0; k < 40; ++k) {
        M = M * M;
        for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) /= M.row(i).sum();
    }
    return M.row(0).transpose();
}

inline Eigen::MatrixXd random_stochastic(int n, std::mt19937_64& rng, double lo = 0.1) {
    std::uniform_real_distribution<double> u(lo, 1.0);
    Eigen::MatrixXd P(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) P(i, j) = u(rng);
        P.row(i) /= P.row(i).sum();
    }
    return P;
}

// Mid series from explicit (time, mid) points.
inline gchp::lob::MidSeries mid_series(std::vector<gchp::lob::MidPoint> points, double horizon, int session = 0) {
    gchp::lob::MidSeries m;
    m.session_id = session;
    m.horizon = horizon;
    m.points = std::move(points);
    return m;
}

} // namespace oracle
