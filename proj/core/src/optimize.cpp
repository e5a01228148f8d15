#include "gchp/optimize.hpp"

#include "gchp/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gchp::optim {

namespace {

using Point = std::vector<double>;

Point affine(const Point& a, const Point& b, double t) {
    // a + t (b - a)
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double inv_base = 1.0 / static_cast<double>(base);
    double factor = inv_base;
    double value = 0.0;
    while (index > 0) {
        value += static_cast<double>(index % base) * factor;
        index /= base;
        factor *= inv_base;
    }
    return value;
}

} // namespace

NelderMeadResult nelder_mead(const Objective& f,
                             std::span<const double> x0,
                             std::span<const double> step,
                             const NelderMeadOptions& options) {
    const std::size_t dim = x0.size();
    if (dim == 0 || step.size() != dim) {
        throw std::invalid_argument("nelder_mead: x0 and step must be non-empty and equal length");
    }

    NelderMeadResult result;
    auto eval = [&](const Point& p) {
        ++result.evaluations;
        double v = f(p);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<Point> simplex(dim + 1, Point(x0.begin(), x0.end()));
    std::vector<double> values(dim + 1);
    values[0] = eval(simplex[0]);
    for (std::size_t i = 0; i < dim; ++i) {
        simplex[i + 1][i] += step[i];
        values[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<std::size_t> order(dim + 1);
    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - 1];

        double x_spread = 0.0;
        for (std::size_t v = 0; v <= dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i) {
                x_spread = std::max(x_spread, std::abs(simplex[v][i] - simplex[best][i]));
            }
        }
        const double f_spread = values[worst] - values[best];
        if (std::isfinite(values[best]) &&
            f_spread <= options.f_tolerance * (1.0 + std::abs(values[best])) &&
            x_spread <= options.x_tolerance) {
            result.converged = true;
            break;
        }
        if (result.evaluations >= options.max_evaluations) break;

        Point centroid(dim, 0.0);
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == worst) continue;
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v][i];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        Point reflected = affine(centroid, simplex[worst], -1.0);
        double f_reflected = eval(reflected);
        if (f_reflected < values[best]) {
            Point expanded = affine(centroid, simplex[worst], -2.0);
            double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = std::move(expanded);
                values[worst] = f_expanded;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < values[second_worst]) {
            simplex[worst] = std::move(reflected);
            values[worst] = f_reflected;
            continue;
        }

        // contraction: outside if the reflection improved on the worst vertex
        const bool outside = f_reflected < values[worst];
        Point contracted = outside ? affine(centroid, reflected, 0.5)
                                   : affine(centroid, simplex[worst], 0.5);
        double f_contracted = eval(contracted);
        if (f_contracted < (outside ? f_reflected : values[worst])) {
            simplex[worst] = std::move(contracted);
            values[worst] = f_contracted;
            continue;
        }

        // shrink toward the best vertex
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == best) continue;
            simplex[v] = affine(simplex[best], simplex[v], 0.5);
            values[v] = eval(simplex[v]);
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const auto best_index = static_cast<std::size_t>(best_it - values.begin());
    result.x = simplex[best_index];
    result.value = *best_it;
    return result;
}

std::vector<std::vector<double>> scrambled_halton(std::size_t count,
                                                  std::size_t dims,
                                                  std::uint64_t seed) {
    static constexpr std::array<std::uint64_t, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (dims > kPrimes.size()) throw std::invalid_argument("scrambled_halton: too many dimensions");

    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> shift(dims);
    for (double& s : shift) s = unit(rng);

    std::vector<std::vector<double>> points(count, std::vector<double>(dims));
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t d = 0; d < dims; ++d) {
            double u = radical_inverse(k + 1, kPrimes[d]) + shift[d];
            points[k][d] = u - std::floor(u);
        }
    }
    return points;
}

} // namespace gchp::optim
