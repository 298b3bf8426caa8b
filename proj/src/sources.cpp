#include "dht/sources.hpp"

#include <cmath>
#include <limits>

#include "dht/sensor.hpp"

namespace dht {

namespace {

// KL between two truncated Gaussians over the same window, centers a and b
// both inside: sum_s P(s|a) * (ln P(s|a) - ln P(s|b)).
double windowed_gaussian_kl(const ScenarioSpec& s, const GridPos& q, int radius,
                            const GridPos& a, const GridPos& b) {
    const auto cells = sensing_window_cells(q, radius, s.grid);
    double d = 0.0;
    for (const auto& c : cells) {
        const double pa = sensor_prob(c, q, a, s.sigma, radius, s.grid);
        const double pb = sensor_prob(c, q, b, s.sigma, radius, s.grid);
        d += pa * (std::log(pa) - std::log(pb));
    }
    return d;
}

// Divergence contributed by target j alone (0 when the instances coincide or
// are both invisible; +inf when exactly one is visible).
double per_target_kl(const ScenarioSpec& s, AgentId observer, const GridPos& q,
                     long t, AgentId j, bool bit_h, bool bit_hp) {
    const GridPos a = s.instance_position(j, bit_h, t);
    const GridPos b = s.instance_position(j, bit_hp, t);
    if (a == b) return 0.0;
    const int radius = s.agents[observer].sensing_radius;
    const bool a_in = in_sensing_window(q, a, radius);
    const bool b_in = in_sensing_window(q, b, radius);
    if (a_in && b_in) return windowed_gaussian_kl(s, q, radius, a, b);
    if (a_in || b_in) return std::numeric_limits<double>::infinity();
    return 0.0;
}

} // namespace

double observation_kl(const ScenarioSpec& s, AgentId observer, const GridPos& q,
                      long t, HypId h, HypId hp) {
    double total = 0.0;
    for (AgentId j = 0; j < s.num_agents(); ++j) {
        if (j == observer) continue;
        const bool bit_h = s.hypotheses.good_bit(h, j);
        const bool bit_hp = s.hypotheses.good_bit(hp, j);
        if (bit_h == bit_hp) continue;
        total += per_target_kl(s, observer, q, t, j, bit_h, bit_hp);
        if (std::isinf(total)) return total;
    }
    return total;
}

bool is_source_state(const ScenarioSpec& s, AgentId observer, HypId h, HypId hp,
                     const GridPos& q, long t, double eps) {
    return observation_kl(s, observer, q, t, h, hp) > eps;
}

SourceSetIndex SourceSetIndex::compute(const ScenarioSpec& s, double eps) {
    const int m = s.hypotheses.count();
    const int n = s.num_agents();
    const long period = s.joint_period();

    SourceSetIndex idx;
    idx.m_ = m;
    idx.masks_.assign(static_cast<std::size_t>(m) * m, 0);

    for (AgentId i = 0; i < n; ++i) {
        // Per-target divergence contributions along agent i's assigned
        // patrol, one row per phase of the joint period and one column per
        // flip direction (KL is asymmetric).  Hypothesis pairs then sum the
        // columns where their labels differ, picking the direction that
        // matches which label holds the good bit.
        std::vector<std::vector<double>> good_vs_bad(
            static_cast<std::size_t>(period), std::vector<double>(n, 0.0));
        std::vector<std::vector<double>> bad_vs_good = good_vs_bad;
        for (long t = 0; t < period; ++t) {
            const GridPos q = position_at(s.agents[i].path.good_cycle, t);
            for (AgentId j = 0; j < n; ++j) {
                if (j == i) continue;
                good_vs_bad[t][j] = per_target_kl(s, i, q, t, j, true, false);
                bad_vs_good[t][j] = per_target_kl(s, i, q, t, j, false, true);
            }
        }
        for (HypId h = 0; h < m; ++h) {
            for (HypId hp = 0; hp < m; ++hp) {
                if (hp == h) continue;
                const std::uint64_t lh = s.hypotheses.label(h);
                const std::uint64_t diff = lh ^ s.hypotheses.label(hp);
                bool visits = false;
                for (long t = 0; t < period && !visits; ++t) {
                    double sum = 0.0;
                    for (AgentId j = 0; j < n; ++j) {
                        if (j == i || !((diff >> j) & 1ULL)) continue;
                        sum += ((lh >> j) & 1ULL) ? good_vs_bad[t][j]
                                                  : bad_vs_good[t][j];
                    }
                    visits = sum > eps;
                }
                if (visits) {
                    idx.masks_[static_cast<std::size_t>(h) * m + hp] |= mask_bit(i);
                }
            }
        }
    }
    return idx;
}

bool SourceSetIndex::coverage_holds(HypId h, AgentMask pool, int threshold) const {
    for (HypId hp = 0; hp < m_; ++hp) {
        if (hp == h) continue;
        if (mask_count(source_agents(h, hp) & pool) < threshold) return false;
    }
    return true;
}

} // namespace dht
