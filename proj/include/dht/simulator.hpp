#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dht/engine.hpp"
#include "dht/scenario.hpp"
#include "dht/sources.hpp"

namespace dht {

// A runtime invariant was violated mid-run (normalization drift, a good
// agent's actual belief in the true hypothesis hitting zero, ...).  These
// abort the run; the message carries the step and agent.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CaseOneEvent {
    long t = 0;
    AgentId agent = 0;
    HypId hyp = 0;

    friend bool operator==(const CaseOneEvent& a, const CaseOneEvent& b) {
        return a.t == b.t && a.agent == b.agent && a.hyp == b.hyp;
    }
};

// One agent's slice of one step.  For bad agents, `actual` holds the
// broadcast the rest of the team consumed while producing this step (their
// internal state is never updated and `local` stays at its initial value).
// `position` is where the agent really was, and `neighbors` is the set of
// agents (self included) whose broadcasts it could hear there; both are
// functions of the paths alone and never of the seed.
struct AgentRecord {
    Belief local;
    Belief actual;
    GridPos position{};
    AgentMask neighbors = 0;

    friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

struct SimulationTrace {
    // steps[t][agent], t = 0..horizon; steps[0] holds the initial beliefs.
    std::vector<std::vector<AgentRecord>> steps;
    // Case-one fusions, ordered by (t, agent, hyp).
    std::vector<CaseOneEvent> events;

    friend bool operator==(const SimulationTrace&, const SimulationTrace&) = default;
};

struct RunMetrics {
    // First step at which every good agent's actual belief in the true
    // hypothesis is >= tau simultaneously.
    std::optional<long> convergence_time;
    long case_one_total = 0;
    // Running total of case-one events up to and including each step,
    // one entry per step 0..horizon (entry 0 is always 0).
    std::vector<long> cumulative_case_one;
    // Good-agent means of the actual/local belief in the true hypothesis,
    // one entry per step 0..horizon.
    std::vector<double> mean_good_actual_true;
    std::vector<double> mean_good_local_true;
    // Final actual belief in the true hypothesis, per agent.
    std::vector<double> final_actual_true;
};

struct RunResult {
    SimulationTrace trace;
    RunMetrics metrics;
};

struct Finding {
    enum class Level { Error, Warning };
    Level level = Level::Error;
    std::string message;
};

// Semantic checks on a materialized scenario: parameter ranges, positive
// normalized priors, label/identity consistency, path validity under the
// motion graph, the f-bound on bad neighbors over one joint period, and
// warning-level heuristics for the convergence conditions (per-pair
// discriminability along patrols, and per-hypothesis source coverage that the
// configured algorithm can actually collect).
std::vector<Finding> validate(const ScenarioSpec& s);

inline bool has_errors(const std::vector<Finding>& fs) {
    for (const auto& f : fs) {
        if (f.level == Finding::Level::Error) return true;
    }
    return false;
}

/**
 * Runs the scenario to its horizon and returns the full trace plus metrics.
 *
 * Each step proceeds in two phases: first every agent's outgoing broadcast is
 * snapshotted (honest agents re-send their previous actual belief, bad agents
 * fabricate one per their policy), then every good agent observes, updates
 * its local belief, and fuses the snapshot - so no agent ever reads a
 * mid-step value.  Invariants checked every step: beliefs stay normalized
 * within 1e-9, and every good agent keeps strictly positive actual belief in
 * the true hypothesis (throws SimulationError otherwise).
 *
 * Throws std::invalid_argument when validate() reports errors.  The overload
 * taking a SourceSetIndex lets batch drivers reuse the (scenario-dependent,
 * seed-independent) index.
 */
RunResult run(const ScenarioSpec& s);
RunResult run(const ScenarioSpec& s, const SourceSetIndex& sources);

struct AuditIssue {
    long t = 0;
    AgentId agent = 0;
    std::string what;
};

/**
 * Recomputes every belief update from the recorded inputs and compares
 * against the recorded outputs, to within 1 ulp per entry.  For each step k,
 * good agents' inputs are the step k-1 rows (their own beliefs and honest
 * neighbors' broadcasts) plus bad agents' step-k rows (the fabricated
 * broadcasts consumed during that step); observations are re-derived from
 * the deterministic streams.  Also re-checks the recorded case-one events
 * and bad-agent broadcasts.  Returns all mismatches (empty = clean audit).
 */
std::vector<AuditIssue> replay_audit(const ScenarioSpec& s,
                                     const SimulationTrace& trace);

struct CompareRow {
    std::string variant;
    std::uint64_t seed = 0;
    std::optional<long> convergence_time;
    long case_one_total = 0;
};

struct ComparisonTable {
    std::vector<CompareRow> rows; // variant-major, then seed order
    // Median convergence time per variant (nullopt when half or more of the
    // seeds never converged), in variant order.
    std::vector<std::pair<std::string, std::optional<double>>> median_convergence;
};

/**
 * Paired batch over the same seeds: every variant runs every seed.  Variants
 * must share paths, grid, and hypothesis structure - they are meant to differ
 * only in algorithm, fusion rule, or sigma - so that a seed yields the same
 * observation stream for each variant.
 */
ComparisonTable compare(const std::vector<ScenarioSpec>& variants,
                        const std::vector<std::uint64_t>& seeds);

} // namespace dht
