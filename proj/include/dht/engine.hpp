#pragma once

#include <utility>
#include <vector>

#include "dht/belief.hpp"
#include "dht/scenario.hpp"
#include "dht/sources.hpp"
#include "dht/types.hpp"

namespace dht {

struct EngineParams {
    int f = 0;                          // resilience parameter
    FusionRule rule = FusionRule::Min;
};

// Neighbor count the case-one / accumulation condition demands per hypothesis
// pair: 2f+1 source agents under the minimum rule, 2f+2 under the average
// rule (the average additionally sacrifices an f+1-sized high set).
inline int coverage_threshold(const EngineParams& p) {
    return p.rule == FusionRule::Min ? 2 * p.f + 1 : 2 * p.f + 2;
}

/**
 * Per-hypothesis accumulator state for the asynchronous algorithm: the
 * broadcast values saved per agent (latest value wins), the set of agents
 * heard from since the last reset (always including self), and the flag that
 * schedules a reset after a successful fusion.
 */
struct AdhtHypState {
    std::vector<double> saved; // indexed by agent id; meaningful where collected
    AgentMask collected = 0;
    bool reset_flag = false;
};

struct AdhtState {
    std::vector<AdhtHypState> per_hyp;

    static AdhtState initial(int num_agents, int num_hyps);
};

struct AgentState {
    AgentId id = 0;
    Belief local;   // b^l, normalized
    Belief actual;  // b^a, normalized
    AdhtState adht; // used only when running the asynchronous algorithm
};

// A fusion pool: (agent id, that agent's shared belief in one hypothesis),
// in ascending id order.
using SharedPool = std::vector<std::pair<AgentId, double>>;

/**
 * Bayesian update of the local belief: posterior(h) proportional to
 * likelihoods[h] * prev(h).  Throws std::domain_error when every hypothesis
 * has zero posterior mass (inconsistent likelihoods - a modeling or data
 * error upstream, never a legitimate state).
 */
Belief lb_update(const Belief& prev, const std::vector<double>& likelihoods);

/**
 * Minimum rule for one hypothesis: sort the pool ascending by (value, id),
 * discard the first f entries (the ones adversaries could have dragged
 * down), and return the minimum of the remaining values and own_lb.  The
 * result never exceeds own_lb.  Requires pool size > f.
 */
double min_fuse(const SharedPool& pool, int f, double own_lb);

struct LmhPartition {
    std::vector<AgentId> low;  // L: the f lowest shared beliefs
    std::vector<AgentId> mid;  // M: what the average runs over (never empty)
    std::vector<AgentId> high; // H: smallest top set with f+1 sources per pair
};

/**
 * Splits the pool for the average rule.  L holds the f lowest values (ties
 * broken toward lower agent id).  H is the shortest prefix of the
 * belief-descending order (ties again toward lower id) containing at least
 * f+1 members of S(h, hp) for every hp != h.  M is everything else.
 *
 * Requires the average-rule coverage condition |S(h,hp) & pool| >= 2f+2 for
 * all hp != h (throws std::logic_error otherwise); that bound guarantees H
 * stops above the bottom f+1 entries, so L and H never collide and M is
 * non-empty.
 */
LmhPartition partition_lmh(const SharedPool& pool, const SourceSetIndex& sources,
                           HypId h, int f);

/**
 * Average rule: mean of the shared beliefs over part.mid (summed in
 * ascending id order), clamped from above by own_lb.
 */
double avg_fuse(const SharedPool& pool, const LmhPartition& part, double own_lb);

struct StepResult {
    AgentState state;
    std::vector<HypId> case_one; // hypotheses fused via case one this step
};

/**
 * One synchronous update for one good agent.
 *
 * `shares` holds the broadcast beliefs of all agents from the previous step
 * (only neighbor entries are read; the agent's own previous broadcast is in
 * its own slot).  `neighbors` is the current neighbor set including self.
 * `likelihoods` is the per-hypothesis likelihood of the agent's fresh
 * observation.  Per hypothesis h: when every pair (h, hp) has enough source
 * agents among current neighbors, the shared values fuse under the
 * configured rule (case one); otherwise the previous actual belief is
 * clamped by the fresh local belief (case two).  The result is normalized.
 */
StepResult sdht_step(const AgentState& prev, const std::vector<Belief>& shares,
                     AgentMask neighbors, const std::vector<double>& likelihoods,
                     const SourceSetIndex& sources, const EngineParams& params);

/**
 * Accumulation bookkeeping for one hypothesis of the asynchronous algorithm.
 * Applies a pending reset, folds the current neighbors' broadcasts into the
 * accumulator (latest value per agent wins), and reports whether the
 * accumulated set now satisfies the coverage condition; if so, flags the
 * accumulator to reset on the next call.
 */
bool abu(AdhtHypState& acc, AgentMask neighbors, const std::vector<Belief>& shares,
         HypId h, const SourceSetIndex& sources, const EngineParams& params);

/**
 * One asynchronous update for one good agent: like sdht_step, but the
 * case-one condition and fusion pool use the beliefs accumulated across
 * steps rather than the instantaneous neighbor snapshot.
 */
StepResult adht_step(const AgentState& prev, const std::vector<Belief>& shares,
                     AgentMask neighbors, const std::vector<double>& likelihoods,
                     const SourceSetIndex& sources, const EngineParams& params);

} // namespace dht
