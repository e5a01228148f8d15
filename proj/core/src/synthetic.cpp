#include "gchp/synthetic.hpp"

#include "gchp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace gchp {

SyntheticSession simulate_gchp(const GchpGenerator& generator, double horizon, std::uint64_t seed, int session_id) {
    const double half = generator.tick / 2.0;
    if (!(generator.tick > 0.0)) throw std::invalid_argument("simulate_gchp: tick must be positive");
    if (generator.values.size() != generator.P.size()) {
        throw std::invalid_argument("simulate_gchp: one value per chain state required");
    }
    if (generator.initial_state >= generator.P.size()) {
        throw std::out_of_range("simulate_gchp: initial state out of range");
    }
    std::vector<std::int64_t> units;
    for (double v : generator.values) {
        const auto u = std::llround(v / half);
        if (u == 0 || std::abs(v / half - static_cast<double>(u)) > 1e-6) {
            throw std::invalid_argument("simulate_gchp: state values must be nonzero multiples of tick/2");
        }
        units.push_back(u);
    }

    const EventSeries events = simulate(generator.hawkes, horizon, derive_seed(seed, 0));
    Rng chain_rng(derive_seed(seed, 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SyntheticSession out;
    out.mid.session_id = session_id;
    out.mid.horizon = horizon;
    out.mid.points.reserve(events.size() + 1);
    std::int64_t level = std::llround(generator.s0 / half);
    out.mid.points.push_back({0.0, static_cast<double>(level) * half});

    std::vector<PriceMove> moves;
    moves.reserve(events.size());
    out.states.reserve(events.size());
    std::size_t state = generator.initial_state;
    for (double t : events.times()) {
        state = next_state(generator.P, state, unit(chain_rng));
        level += units[state];
        // A first event at exactly t = 0 would collide with the opening point.
        const double time = t > 0.0 ? t : std::nextafter(0.0, 1.0);
        out.mid.points.push_back({time, static_cast<double>(level) * half});
        moves.push_back({time, static_cast<double>(units[state]) * half});
        out.states.push_back(state);
    }
    out.moves = PriceMoveSeries(std::move(moves), generator.tick);
    return out;
}

} // namespace gchp
