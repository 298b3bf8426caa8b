#pragma once

#include <cstdint>
#include <vector>

#include "dht/types.hpp"

namespace dht {

/**
 * The finite hypothesis set the team reasons over.
 *
 * Each hypothesis is a claim about which agents are good and which are bad,
 * encoded as a bitmask label: bit j = 1 means "agent j is good" under that
 * hypothesis, bit j = 0 means "agent j is bad".  Labels are distinct and
 * there are at least two of them.  Hypotheses are referred to by index
 * (HypId) everywhere else; the labels drive the observation model, which
 * places each agent j on its good or bad patrol cycle depending on bit j.
 */
class HypothesisSet {
public:
    HypothesisSet() = default;

    // `labels[h]` holds the per-agent good/bad bits for hypothesis h, over
    // `num_agents` agents.  Throws std::invalid_argument when fewer than two
    // hypotheses are given, labels repeat, or a label has bits beyond
    // num_agents.
    HypothesisSet(std::vector<std::uint64_t> labels, int num_agents);

    // All bit-tuples over `num_agents` agents with at most `max_bad` zero
    // bits, in ascending order of bad-set size then ascending label value.
    // max_bad = num_agents yields the full product set of size 2^num_agents.
    static HypothesisSet at_most_bad(int num_agents, int max_bad);

    int count() const { return static_cast<int>(labels_.size()); }
    int num_agents() const { return num_agents_; }

    std::uint64_t label(HypId h) const { return labels_[h]; }

    // True iff agent j is good under hypothesis h.
    bool good_bit(HypId h, AgentId j) const { return (labels_[h] >> j) & 1ULL; }

    // Index of the hypothesis with this label, or -1 if absent.
    HypId index_of(std::uint64_t label) const;

    friend bool operator==(const HypothesisSet&, const HypothesisSet&) = default;

private:
    std::vector<std::uint64_t> labels_;
    int num_agents_ = 0;
};

} // namespace dht
