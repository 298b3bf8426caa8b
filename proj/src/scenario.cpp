#include "dht/scenario.hpp"

#include <numeric>
#include <stdexcept>

namespace dht {

const char* to_string(Algorithm a) {
    return a == Algorithm::Sdht ? "sdht" : "adht";
}

const char* to_string(FusionRule r) {
    return r == FusionRule::Min ? "min" : "avg";
}

AgentMask ScenarioSpec::good_mask() const {
    AgentMask m = 0;
    for (const auto& a : agents) {
        if (a.identity == Identity::Good) m |= mask_bit(a.id);
    }
    return m;
}

std::vector<GridPos> ScenarioSpec::actual_positions(long t) const {
    std::vector<GridPos> out(agents.size());
    for (AgentId j = 0; j < num_agents(); ++j) {
        out[j] = actual_position(j, t);
    }
    return out;
}

long ScenarioSpec::joint_period() const {
    constexpr long kMaxPeriod = 1 << 20;
    long p = 1;
    for (const auto& a : agents) {
        for (const auto* cyc : {&a.path.good_cycle, &a.path.bad_cycle}) {
            if (cyc->empty()) {
                throw std::invalid_argument("agent " + std::to_string(a.id) +
                                            " has an empty cycle");
            }
            p = std::lcm(p, static_cast<long>(cyc->size()));
            if (p > kMaxPeriod) {
                throw std::invalid_argument(
                    "joint path period exceeds " + std::to_string(kMaxPeriod) +
                    " steps; align cycle lengths");
            }
        }
    }
    return p;
}

} // namespace dht
