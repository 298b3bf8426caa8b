#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dht/belief.hpp"
#include "dht/grid.hpp"
#include "dht/hypothesis.hpp"
#include "dht/types.hpp"

namespace dht {

enum class Identity { Good, Bad };
enum class Algorithm { Sdht, Adht };
enum class FusionRule { Min, Avg };

const char* to_string(Algorithm a);
const char* to_string(FusionRule r);

/**
 * What a bad agent broadcasts instead of an honestly computed belief.
 *
 *  - RandomBelief: a fresh uniform-Dirichlet draw each step (a simplex point
 *    obtained by normalizing unit-exponential variates).
 *  - FixedFalse:   a one-hot belief on a fixed false hypothesis, every step.
 *  - Coordinated:  FixedFalse semantics; the name declares that several bad
 *    agents share one false hypothesis and therefore transmit identical
 *    beliefs.
 *  - Custom:       a scripted sequence of belief vectors; once exhausted the
 *    last entry repeats forever.
 */
struct AdversaryConfig {
    enum class Policy { RandomBelief, FixedFalse, Coordinated, Custom };

    Policy policy = Policy::RandomBelief;
    // FixedFalse / Coordinated: label of the hypothesis to push.
    std::uint64_t false_label = 0;
    // Custom: the scripted broadcasts (each normalized, sized to |hypotheses|).
    std::vector<Belief> script;

    friend bool operator==(const AdversaryConfig&, const AdversaryConfig&) = default;
};

struct AgentSpec {
    AgentId id = 0;
    Identity identity = Identity::Good;
    int comm_radius = 0;
    int sensing_radius = 0;
    StatePath path;
    Belief initial_local;  // prior over hypotheses, strictly positive
    Belief initial_actual; // prior over hypotheses, strictly positive
    std::optional<AdversaryConfig> adversary; // present iff identity == Bad

    friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

/**
 * A fully materialized scenario: everything a run needs, with defaults
 * already applied.  Construction happens either in tests or via
 * load_scenario(); validate() (simulator module) checks semantic rules.
 */
struct ScenarioSpec {
    std::string name;
    GridDims grid;
    MotionGraph motion = MotionGraph::eight_connected();
    HypothesisSet hypotheses;
    HypId true_hypothesis = 0;
    double sigma = 1.0;
    int f = 0;
    Algorithm algorithm = Algorithm::Sdht;
    FusionRule rule = FusionRule::Min;
    int horizon = 0;
    std::uint64_t seed = 0;
    double tau = 0.99;
    std::vector<AgentSpec> agents;

    int num_agents() const { return static_cast<int>(agents.size()); }

    bool is_good(AgentId j) const { return agents[j].identity == Identity::Good; }

    AgentMask good_mask() const;

    // Where agent j would be at time t if its good/bad bit were `good_bit`.
    // Both instances are public model knowledge: the good cycle is agent j's
    // assigned patrol and the bad cycle is the route a bad agent j would fly.
    GridPos instance_position(AgentId j, bool good_bit, long t) const {
        const auto& cyc = good_bit ? agents[j].path.good_cycle : agents[j].path.bad_cycle;
        return position_at(cyc, t);
    }

    // Agent j's true position at time t (by its actual identity).
    GridPos actual_position(AgentId j, long t) const {
        return instance_position(j, is_good(j), t);
    }

    // Positions of all agents at time t under their actual identities.
    std::vector<GridPos> actual_positions(long t) const;

    // Least common multiple of every declared cycle length: after this many
    // steps the whole joint configuration (all good and bad instances)
    // repeats.  Throws if the lcm exceeds a sanity bound.
    long joint_period() const;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

} // namespace dht
