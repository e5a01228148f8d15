#include "gchp/limits.hpp"

#include "gchp/error.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gchp {

double LimitParams::sigma() const noexcept { return std::sqrt(sigma_sq); }

LimitParams compute_limit_params(std::span<const double> values, const TransitionMatrix& transition,
                                 const StationaryDistribution& stationary, const HawkesParams& hawkes) {
    const auto n = static_cast<Eigen::Index>(values.size());
    if (n == 0 || n != static_cast<Eigen::Index>(transition.size()) || n != stationary.pi.size()) {
        throw std::invalid_argument("compute_limit_params: state values, P and pi must have the same size");
    }
    const Eigen::MatrixXd& P = transition.probabilities();
    const Eigen::VectorXd& pi = stationary.pi;
    const Eigen::Map<const Eigen::VectorXd> a(values.data(), n);

    LimitParams out;
    out.a_star = pi.dot(a);
    out.b = a.array() - out.a_star;

    // Pi* has every row equal to pi.
    const Eigen::MatrixXd fundamental =
        P + Eigen::VectorXd::Ones(n) * pi.transpose() - Eigen::MatrixXd::Identity(n, n);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(fundamental);
    const double rcond = lu.rcond();
    if (!(rcond >= 1e-12)) {
        throw Error(ErrorCode::SingularFundamentalMatrix,
                    "P + Pi* - I is singular (rcond " + std::to_string(rcond) + "); chain not ergodic");
    }
    out.g = lu.solve(out.b);

    // v(i) = b(i)^2 + sum_j (g(j)-g(i))^2 P(i,j) - 2 b(i) sum_j (g(j)-g(i)) P(i,j),
    // regrouped with sum_j P(i,j) = 1 as a non-negative sum of squares.
    out.v.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = out.g(j) - out.g(i) - out.b(i);
            acc += P(i, j) * r * r;
        }
        out.v(i) = acc;
    }
    out.sigma_sq = pi.dot(out.v);

    const double mu = hawkes.branching_ratio();
    const double rate = hawkes.lambda0() / (1.0 - mu);
    out.sigma_star = std::sqrt(out.sigma_sq) * std::sqrt(rate);
    out.sigma_bar = std::sqrt(out.sigma_star * out.sigma_star +
                              out.a_star * out.a_star * hawkes.lambda0() / std::pow(1.0 - mu, 3));
    return out;
}

LimitParams compute_limit_params(const StateSpace& space, const TransitionMatrix& P,
                                 const StationaryDistribution& pi, const HawkesParams& hawkes) {
    return compute_limit_params(space.values(), P, pi, hawkes);
}

} // namespace gchp
