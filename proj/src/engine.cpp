#include "dht/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dht {

AdhtState AdhtState::initial(int num_agents, int num_hyps) {
    AdhtState s;
    s.per_hyp.resize(num_hyps);
    for (auto& hs : s.per_hyp) {
        hs.saved.assign(num_agents, 0.0);
    }
    return s;
}

Belief lb_update(const Belief& prev, const std::vector<double>& likelihoods) {
    if (likelihoods.size() != prev.size()) {
        throw std::invalid_argument("lb_update: likelihood vector length mismatch");
    }
    std::vector<double> raw(prev.size());
    double denom = 0.0;
    for (std::size_t h = 0; h < prev.size(); ++h) {
        if (!(likelihoods[h] >= 0.0)) {
            throw std::invalid_argument("lb_update: negative or NaN likelihood");
        }
        raw[h] = likelihoods[h] * prev[h];
        denom += raw[h];
    }
    if (denom <= 0.0) {
        throw std::domain_error("lb_update: all hypotheses have zero posterior "
                                "mass; observation inconsistent with the model");
    }
    for (double& v : raw) v /= denom;
    return Belief(std::move(raw));
}

namespace {

// Ascending by (value, id); used for L selection and the min-rule discard.
void sort_ascending(SharedPool& pool) {
    std::sort(pool.begin(), pool.end(),
              [](const std::pair<AgentId, double>& a,
                 const std::pair<AgentId, double>& b) {
                  return a.second != b.second ? a.second < b.second
                                              : a.first < b.first;
              });
}

// Descending by value, ties toward the lower agent id (so equal-valued
// agents enter H lowest-id first).
void sort_descending(SharedPool& pool) {
    std::sort(pool.begin(), pool.end(),
              [](const std::pair<AgentId, double>& a,
                 const std::pair<AgentId, double>& b) {
                  return a.second != b.second ? a.second > b.second
                                              : a.first < b.first;
              });
}

SharedPool gather_pool(AgentMask members, const std::vector<Belief>& shares,
                       HypId h) {
    SharedPool pool;
    for (AgentId j = 0; j < static_cast<AgentId>(shares.size()); ++j) {
        if (mask_test(members, j)) pool.emplace_back(j, shares[j][h]);
    }
    return pool;
}

SharedPool gather_accumulated(const AdhtHypState& acc) {
    SharedPool pool;
    for (AgentId j = 0; j < static_cast<AgentId>(acc.saved.size()); ++j) {
        if (mask_test(acc.collected, j)) pool.emplace_back(j, acc.saved[j]);
    }
    return pool;
}

double fuse_case_one(const SharedPool& pool, const SourceSetIndex& sources,
                     HypId h, double own_lb, const EngineParams& params) {
    if (params.rule == FusionRule::Min) {
        return min_fuse(pool, params.f, own_lb);
    }
    const LmhPartition part = partition_lmh(pool, sources, h, params.f);
    return avg_fuse(pool, part, own_lb);
}

} // namespace

double min_fuse(const SharedPool& pool, int f, double own_lb) {
    if (static_cast<int>(pool.size()) <= f) {
        throw std::logic_error("min_fuse: pool must hold more than f entries");
    }
    SharedPool sorted = pool;
    sort_ascending(sorted);
    // After dropping the f lowest, the minimum survivor is the entry at f.
    return std::min(sorted[static_cast<std::size_t>(f)].second, own_lb);
}

LmhPartition partition_lmh(const SharedPool& pool, const SourceSetIndex& sources,
                           HypId h, int f) {
    const int m = sources.hypothesis_count();
    AgentMask pool_mask = 0;
    for (const auto& [id, v] : pool) pool_mask |= mask_bit(id);
    if (!sources.coverage_holds(h, pool_mask, 2 * f + 2)) {
        throw std::logic_error("partition_lmh: pool lacks 2f+2 source agents "
                               "for some hypothesis pair");
    }

    SharedPool asc = pool;
    sort_ascending(asc);
    SharedPool desc = pool;
    sort_descending(desc);

    LmhPartition part;
    AgentMask low_mask = 0;
    for (int k = 0; k < f; ++k) {
        part.low.push_back(asc[k].first);
        low_mask |= mask_bit(asc[k].first);
    }

    // Grow H from the top of the descending order until every pair (h, hp)
    // has at least f+1 source agents inside.  Entries already claimed by L
    // are skipped: with tied values both orders would otherwise pick the
    // same agent, and the three sets must stay disjoint.
    AgentMask high_mask = 0;
    std::size_t taken = 0;
    while (taken < desc.size()) {
        bool covered = true;
        for (HypId hp = 0; hp < m && covered; ++hp) {
            if (hp == h) continue;
            covered = mask_count(sources.source_agents(h, hp) & high_mask) >= f + 1;
        }
        if (covered) break;
        if (!mask_test(low_mask, desc[taken].first)) {
            high_mask |= mask_bit(desc[taken].first);
            part.high.push_back(desc[taken].first);
        }
        ++taken;
    }

    for (const auto& [id, v] : pool) {
        if (!mask_test(low_mask | high_mask, id)) part.mid.push_back(id);
    }
    if (part.mid.empty()) {
        throw std::logic_error("partition_lmh: middle set is empty");
    }
    std::sort(part.low.begin(), part.low.end());
    std::sort(part.mid.begin(), part.mid.end());
    std::sort(part.high.begin(), part.high.end());
    return part;
}

double avg_fuse(const SharedPool& pool, const LmhPartition& part, double own_lb) {
    double sum = 0.0;
    for (const auto& [id, v] : pool) {
        if (std::find(part.mid.begin(), part.mid.end(), id) != part.mid.end()) {
            sum += v;
        }
    }
    const double mean = sum / static_cast<double>(part.mid.size());
    return std::min(mean, own_lb);
}

StepResult sdht_step(const AgentState& prev, const std::vector<Belief>& shares,
                     AgentMask neighbors, const std::vector<double>& likelihoods,
                     const SourceSetIndex& sources, const EngineParams& params) {
    const int m = sources.hypothesis_count();
    StepResult out;
    out.state = prev;
    out.state.local = lb_update(prev.local, likelihoods);

    const int threshold = coverage_threshold(params);
    std::vector<double> raw(m);
    for (HypId h = 0; h < m; ++h) {
        if (sources.coverage_holds(h, neighbors, threshold)) {
            const SharedPool pool = gather_pool(neighbors, shares, h);
            raw[h] = fuse_case_one(pool, sources, h, out.state.local[h], params);
            out.case_one.push_back(h);
        } else {
            raw[h] = std::min(prev.actual[h], out.state.local[h]);
        }
    }
    out.state.actual = normalize(Belief(std::move(raw)));
    return out;
}

bool abu(AdhtHypState& acc, AgentMask neighbors, const std::vector<Belief>& shares,
         HypId h, const SourceSetIndex& sources, const EngineParams& params) {
    if (acc.reset_flag) {
        std::fill(acc.saved.begin(), acc.saved.end(), 0.0);
        acc.collected = 0;
        acc.reset_flag = false;
    }
    for (AgentId j = 0; j < static_cast<AgentId>(acc.saved.size()); ++j) {
        if (mask_test(neighbors, j)) {
            acc.collected |= mask_bit(j);
            acc.saved[j] = shares[j][h]; // latest broadcast wins
        }
    }
    if (!sources.coverage_holds(h, acc.collected, coverage_threshold(params))) {
        return false;
    }
    acc.reset_flag = true; // start a fresh accumulation after this fusion
    return true;
}

StepResult adht_step(const AgentState& prev, const std::vector<Belief>& shares,
                     AgentMask neighbors, const std::vector<double>& likelihoods,
                     const SourceSetIndex& sources, const EngineParams& params) {
    const int m = sources.hypothesis_count();
    StepResult out;
    out.state = prev;
    out.state.local = lb_update(prev.local, likelihoods);

    std::vector<double> raw(m);
    for (HypId h = 0; h < m; ++h) {
        AdhtHypState& acc = out.state.adht.per_hyp[h];
        if (abu(acc, neighbors, shares, h, sources, params)) {
            const SharedPool pool = gather_accumulated(acc);
            raw[h] = fuse_case_one(pool, sources, h, out.state.local[h], params);
            out.case_one.push_back(h);
        } else {
            raw[h] = std::min(prev.actual[h], out.state.local[h]);
        }
    }
    out.state.actual = normalize(Belief(std::move(raw)));
    return out;
}

} // namespace dht
