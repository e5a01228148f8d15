#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gchp::optim {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
    int max_evaluations{2000};
    // Converged when the simplex spread in f is below
    // f_tolerance * (1 + |f_best|) and the spread in x is below x_tolerance.
    double f_tolerance{1e-10};
    double x_tolerance{1e-7};
};

struct NelderMeadResult {
    std::vector<double> x;
    double value{0.0};
    int evaluations{0};
    bool converged{false};
};

// Minimizes f starting from the simplex {x0, x0 + step_i e_i}. The returned
// value never exceeds f(x0).
[[nodiscard]] NelderMeadResult nelder_mead(const Objective& f,
                                           std::span<const double> x0,
                                           std::span<const double> step,
                                           const NelderMeadOptions& options = {});

// `count` points of the Halton sequence in [0,1)^dims with a Cranley-Patterson
// rotation drawn from `seed`. Deterministic in (count, dims, seed).
[[nodiscard]] std::vector<std::vector<double>> scrambled_halton(std::size_t count,
                                                                std::size_t dims,
                                                                std::uint64_t seed);

} // namespace gchp::optim
