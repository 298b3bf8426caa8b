#include "dht/hypothesis.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace dht {

HypothesisSet::HypothesisSet(std::vector<std::uint64_t> labels, int num_agents)
    : labels_(std::move(labels)), num_agents_(num_agents) {
    if (num_agents_ < 1 || num_agents_ > kMaxAgents) {
        throw std::invalid_argument("hypothesis set needs 1.." +
                                    std::to_string(kMaxAgents) + " agents");
    }
    if (labels_.size() < 2) {
        throw std::invalid_argument("hypothesis set needs at least two hypotheses");
    }
    const std::uint64_t valid =
        num_agents_ == 64 ? ~0ULL : (1ULL << num_agents_) - 1;
    for (std::uint64_t l : labels_) {
        if (l & ~valid) {
            throw std::invalid_argument("hypothesis label has bits beyond the agent count");
        }
    }
    std::vector<std::uint64_t> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("hypothesis labels must be distinct");
    }
}

HypothesisSet HypothesisSet::at_most_bad(int num_agents, int max_bad) {
    if (num_agents < 1 || num_agents > kMaxAgents) {
        throw std::invalid_argument("at_most_bad: agent count out of range");
    }
    if (max_bad < 0 || max_bad > num_agents) {
        throw std::invalid_argument("at_most_bad: bad-agent bound out of range");
    }
    const std::uint64_t all_good =
        num_agents == 64 ? ~0ULL : (1ULL << num_agents) - 1;
    std::vector<std::uint64_t> labels;
    for (int bad = 0; bad <= max_bad; ++bad) {
        // Enumerate every way to pick `bad` agents as the zero bits.
        std::vector<int> pick(bad);
        for (int i = 0; i < bad; ++i) pick[i] = i;
        std::vector<std::uint64_t> tier;
        while (true) {
            std::uint64_t m = all_good;
            for (int i : pick) m &= ~(1ULL << i);
            tier.push_back(m);
            if (bad == 0) break;
            int k = bad - 1;
            while (k >= 0 && pick[k] == num_agents - bad + k) --k;
            if (k < 0) break;
            ++pick[k];
            for (int i = k + 1; i < bad; ++i) pick[i] = pick[i - 1] + 1;
        }
        std::sort(tier.begin(), tier.end());
        labels.insert(labels.end(), tier.begin(), tier.end());
    }
    return HypothesisSet(std::move(labels), num_agents);
}

HypId HypothesisSet::index_of(std::uint64_t label) const {
    for (std::size_t h = 0; h < labels_.size(); ++h) {
        if (labels_[h] == label) return static_cast<HypId>(h);
    }
    return -1;
}

} // namespace dht
