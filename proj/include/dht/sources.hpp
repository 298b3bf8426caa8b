#pragma once

#include <vector>

#include "dht/scenario.hpp"
#include "dht/types.hpp"

namespace dht {

// Divergences below this are treated as "the two hypotheses look identical
// from here" (guards against floating-point dust in otherwise-zero sums).
inline constexpr double kSourceKlEps = 1e-12;

/**
 * KL divergence between the observation distributions agent `observer` would
 * face at position q and time t under hypotheses h and hp.
 *
 * Per target j whose good/bad bit differs between the two hypotheses, the
 * reading distribution is: the truncated Gaussian over the window when the
 * hypothesized instance position is inside the sensing window, else a point
 * mass on the empty reading.  Independence across targets makes the joint
 * divergence the sum of per-target divergences.  A target visible under one
 * hypothesis but not the other yields +infinity (the distributions disagree
 * on an event of probability one); infinity counts as divergence for
 * source-state purposes.
 */
double observation_kl(const ScenarioSpec& s, AgentId observer, const GridPos& q,
                      long t, HypId h, HypId hp);

/**
 * True iff standing at q at time t would let `observer` statistically
 * distinguish h from hp, i.e. observation_kl(...) > eps.
 */
bool is_source_state(const ScenarioSpec& s, AgentId observer, HypId h, HypId hp,
                     const GridPos& q, long t, double eps = kSourceKlEps);

/**
 * For every ordered hypothesis pair (h, hp), the set S(h, hp) of agents whose
 * declared patrol visits at least one source state for that pair within one
 * joint path period.  Periodicity makes "once per period" equivalent to
 * "infinitely often".
 *
 * Membership is evaluated along each agent's good cycle - the patrol it is
 * assigned and expected to fly.  (A bad agent deviates from it, but the
 * fusion rules discard up to f misbehaving entries, so a bad agent wrongly
 * counted as a source costs nothing that the f-bound has not already paid
 * for.)  The index depends only on declared paths, never on run-time
 * randomness, so all agents and the validator can derive the same index.
 */
class SourceSetIndex {
public:
    static SourceSetIndex compute(const ScenarioSpec& s, double eps = kSourceKlEps);

    int hypothesis_count() const { return m_; }

    AgentMask source_agents(HypId h, HypId hp) const {
        return masks_[static_cast<std::size_t>(h) * m_ + hp];
    }

    // True iff |S(h, hp) & pool| >= threshold for every hp != h.  This is the
    // case-one / accumulation condition with pool = the (current or
    // accumulated) neighbor set.
    bool coverage_holds(HypId h, AgentMask pool, int threshold) const;

private:
    int m_ = 0;
    std::vector<AgentMask> masks_; // row-major [h][hp], diagonal zero
};

} // namespace dht
