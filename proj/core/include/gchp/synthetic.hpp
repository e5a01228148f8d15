#pragma once

#include "gchp/hawkes.hpp"
#include "gchp/lob.hpp"
#include "gchp/states.hpp"

#include <cstdint>
#include <vector>

namespace gchp {

// Forward generator of the compound Hawkes mid-price: Hawkes event times, and
// at each event a Markov step whose state value is added to the mid.
struct GchpGenerator {
    HawkesParams hawkes;
    std::vector<double> values; // nonzero multiples of tick/2
    TransitionMatrix P;
    std::size_t initial_state{0};
    double s0{0.0};
    double tick{0.01};
};

struct SyntheticSession {
    lob::MidSeries mid;
    PriceMoveSeries moves;
    std::vector<std::size_t> states; // state of each move
};

[[nodiscard]] SyntheticSession simulate_gchp(const GchpGenerator& generator, double horizon, std::uint64_t seed,
                                             int session_id = 0);

} // namespace gchp
