#pragma once

#include "gchp/hawkes.hpp"
#include "gchp/states.hpp"

#include <Eigen/Dense>

#include <span>

namespace gchp {

// Diffusive-limit quantities of the compound Hawkes mid-price model.
struct LimitParams {
    double a_star{0.0};   // sum_i pi_i a(i), drift per event
    Eigen::VectorXd b;    // a(i) - a_star
    Eigen::VectorXd g;    // (P + Pi* - I)^{-1} b
    Eigen::VectorXd v;    // per-state variance terms
    double sigma_sq{0.0}; // sum_i pi_i v(i)
    double sigma_star{0.0}; // sigma sqrt(lambda / (1 - mu))
    double sigma_bar{0.0};  // sqrt(sigma_star^2 + a_star^2 lambda / (1 - mu)^3)

    [[nodiscard]] double sigma() const noexcept;
};

// Throws Error(SingularFundamentalMatrix) if P + Pi* - I is numerically
// singular (reciprocal condition estimate below 1e-12).
[[nodiscard]] LimitParams compute_limit_params(std::span<const double> values, const TransitionMatrix& P,
                                               const StationaryDistribution& pi, const HawkesParams& hawkes);

[[nodiscard]] LimitParams compute_limit_params(const StateSpace& space, const TransitionMatrix& P,
                                               const StationaryDistribution& pi, const HawkesParams& hawkes);

} // namespace gchp
