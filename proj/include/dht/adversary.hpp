#pragma once

#include <cstdint>

#include "dht/belief.hpp"
#include "dht/hypothesis.hpp"
#include "dht/scenario.hpp"

namespace dht {

/**
 * The belief a bad agent broadcasts at transition `step` (steps are numbered
 * from 1; broadcast k stands in for the agent's step-(k-1) actual belief).
 * Deterministic given (config, seed, agent, step): random-belief draws use
 * the stream keyed (seed, agent, kAdversaryStream, step).  Broadcasts are
 * normalized belief vectors - adversaries lie about values, not about the
 * message format.
 */
Belief adversarial_broadcast(const AdversaryConfig& cfg, const HypothesisSet& hyps,
                             std::uint64_t seed, AgentId agent, long step);

} // namespace dht
