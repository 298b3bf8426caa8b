#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "dht/grid.hpp"
#include "dht/rng.hpp"
#include "dht/scenario.hpp"

namespace dht {

// A single sensor reading for one target: the cell the target was perceived
// in, or empty when the target is outside the observer's sensing window.
using SensorReading = std::optional<GridPos>;

/**
 * One observation round for an observer: one reading per agent slot, indexed
 * by agent id.  The observer's own slot is always empty and is skipped by
 * every likelihood computation (an agent carries no sensor information about
 * itself).
 */
struct Observation {
    std::vector<SensorReading> readings;
};

/**
 * Probability that the sensor reports cell `reading` when the observer at
 * `observer` senses a target at `target`:
 *
 *     P(s | q_i, q_j) = exp(-||s - q_j||^2 / (2 sigma^2))
 *                       / sum_{q in W} exp(-||q - q_j||^2 / (2 sigma^2))
 *
 * where W is the observer's sensing window (Chebyshev radius, clipped to the
 * grid) and the norm is Euclidean.  `target` may lie outside the window; the
 * distribution then concentrates on the window edge nearest the target.
 *
 * Evaluation procedure (fixed so independent reimplementations reproduce the
 * result bit-for-bit): enumerate the window cells in row-major order,
 * subtract the minimum squared distance from every squared distance before
 * exponentiating, and accumulate the denominator in row-major order.  The
 * shift cancels exactly in the quotient and keeps the quotient well-defined
 * for distant targets, where unshifted terms would underflow to 0/0.
 *
 * Requires sigma > 0, radius >= 0, observer on-grid, and `reading` inside the
 * window (callers only ever evaluate in-window readings).
 */
double sensor_prob(const GridPos& reading, const GridPos& observer,
                   const GridPos& target, double sigma, int radius,
                   const GridDims& dims);

/**
 * Draws a reading for one target.  Outside the sensing window the reading is
 * deterministically empty and no randomness is consumed.  Inside, a single
 * uniform variate u is drawn and the reading is the first window cell (in
 * row-major order) whose cumulative sensor probability exceeds u; the last
 * cell absorbs any floating-point shortfall.
 */
SensorReading sample_reading(SplitMix64& rng, const GridPos& observer,
                             const GridPos& target, double sigma, int radius,
                             const GridDims& dims);

/**
 * Likelihood of one reading under a hypothesized target position:
 *
 *   - reading = cell s:  P(s | observer, hyp_target)   (hyp_target may be
 *     anywhere; a reading never hard-rules-out a position hypothesis)
 *   - reading = empty, hyp_target inside the window:  0   (a target that
 *     were really there would have been seen)
 *   - reading = empty, hyp_target outside the window: 1   (exactly what that
 *     hypothesis predicts)
 *
 * Exact zeros are kept exact; they are how impossible hypotheses get
 * eliminated.
 */
double pair_likelihood(const SensorReading& reading, const GridPos& observer,
                       const GridPos& hyp_target, double sigma, int radius,
                       const GridDims& dims);

/**
 * Joint likelihood of a full observation under hypothesis h: the product of
 * pair likelihoods over targets j != observer in ascending id order, with
 * target j placed on its good or bad cycle according to bit j of h's label.
 */
double joint_likelihood(const ScenarioSpec& s, AgentId observer, long t,
                        const Observation& obs, HypId h);

/**
 * Per-run memo for the expensive part of the sensor model.
 *
 * The quotient denominator (and its stabilizing shift) depends only on the
 * (observer cell, target cell, window shape) combination, and periodic paths
 * revisit the same combinations every period, so caching them removes almost
 * all exp() work from long runs.  Lookups never change results - cached and
 * uncached evaluation follow the identical documented procedure.
 */
class SensorCache {
public:
    explicit SensorCache(const ScenarioSpec& s) : s_(&s) {}

    // sensor_prob with memoized shift/denominator.
    double prob(const GridPos& reading, const GridPos& observer,
                const GridPos& target, int radius);

    // Likelihoods of `obs` under every hypothesis, in hypothesis order.
    std::vector<double> likelihood_vector(AgentId observer, long t,
                                          const Observation& obs);

    // Draws the full observation round for `observer` at time t: one reading
    // per target from its actual position, stream-keyed (seed, observer,
    // target, t).
    Observation observe(AgentId observer, long t,
                        const std::vector<GridPos>& actual_positions);

private:
    struct Entry {
        double shift = 0.0; // min squared distance over the window
        double denom = 0.0;
    };

    const Entry& denom_entry(const GridPos& observer, const GridPos& target,
                             int radius);

    double pair_likelihood_cached(const SensorReading& reading,
                                  const GridPos& observer,
                                  const GridPos& hyp_target, int radius);

    const ScenarioSpec* s_;
    std::unordered_map<std::uint64_t, Entry> denoms_;
};

} // namespace dht
