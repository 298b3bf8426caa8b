#include "dht/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dht/rng.hpp"

namespace dht {

Belief adversarial_broadcast(const AdversaryConfig& cfg, const HypothesisSet& hyps,
                             std::uint64_t seed, AgentId agent, long step) {
    const int m = hyps.count();
    switch (cfg.policy) {
        case AdversaryConfig::Policy::RandomBelief: {
            // Uniform Dirichlet draw: normalize unit-exponential variates.
            auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(agent),
                                          kAdversaryStream,
                                          static_cast<std::uint64_t>(step));
            std::vector<double> raw(m);
            double sum = 0.0;
            for (int h = 0; h < m; ++h) {
                raw[h] = -std::log1p(-rng.next_double());
                sum += raw[h];
            }
            if (sum <= 0.0) return Belief::uniform(m); // all-zero draw: vanishing odds
            for (double& v : raw) v /= sum;
            return Belief(std::move(raw));
        }
        case AdversaryConfig::Policy::FixedFalse:
        case AdversaryConfig::Policy::Coordinated: {
            const HypId h = hyps.index_of(cfg.false_label);
            if (h < 0) {
                throw std::invalid_argument(
                    "adversary pushes a hypothesis that is not in the set");
            }
            std::vector<double> raw(m, 0.0);
            raw[h] = 1.0;
            return Belief(std::move(raw));
        }
        case AdversaryConfig::Policy::Custom: {
            if (cfg.script.empty()) {
                throw std::invalid_argument("custom adversary has an empty script");
            }
            const std::size_t idx =
                std::min<std::size_t>(static_cast<std::size_t>(step > 0 ? step - 1 : 0),
                                      cfg.script.size() - 1);
            return cfg.script[idx]; // exhausted scripts repeat the last entry
        }
    }
    throw std::logic_error("unknown adversary policy");
}

} // namespace dht
