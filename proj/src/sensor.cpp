#include "dht/sensor.hpp"

#include <cmath>
#include <stdexcept>

namespace dht {

namespace {

void check_sensor_args(double sigma, int radius) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sensor sigma must be > 0");
    if (radius < 0) throw std::invalid_argument("sensing radius must be >= 0");
}

// Smallest squared distance from `target` to any window cell, scanned in
// row-major order.
double min_sq_dist(const std::vector<GridPos>& cells, const GridPos& target) {
    double m = euclidean_sq(cells[0], target);
    for (std::size_t k = 1; k < cells.size(); ++k) {
        double d = euclidean_sq(cells[k], target);
        if (d < m) m = d;
    }
    return m;
}

double shifted_weight(const GridPos& cell, const GridPos& target, double shift,
                      double sigma) {
    return std::exp(-(euclidean_sq(cell, target) - shift) / (2.0 * sigma * sigma));
}

} // namespace

double sensor_prob(const GridPos& reading, const GridPos& observer,
                   const GridPos& target, double sigma, int radius,
                   const GridDims& dims) {
    check_sensor_args(sigma, radius);
    if (!in_sensing_window(observer, reading, radius) || !dims.contains(reading)) {
        throw std::invalid_argument("sensor_prob: reading outside the sensing window");
    }
    const auto cells = sensing_window_cells(observer, radius, dims);
    const double shift = min_sq_dist(cells, target);
    double denom = 0.0;
    for (const auto& c : cells) {
        denom += shifted_weight(c, target, shift, sigma);
    }
    return shifted_weight(reading, target, shift, sigma) / denom;
}

SensorReading sample_reading(SplitMix64& rng, const GridPos& observer,
                             const GridPos& target, double sigma, int radius,
                             const GridDims& dims) {
    check_sensor_args(sigma, radius);
    if (!in_sensing_window(observer, target, radius)) {
        return std::nullopt;
    }
    const auto cells = sensing_window_cells(observer, radius, dims);
    const double shift = min_sq_dist(cells, target);
    double denom = 0.0;
    for (const auto& c : cells) {
        denom += shifted_weight(c, target, shift, sigma);
    }
    const double u = rng.next_double();
    double cum = 0.0;
    for (const auto& c : cells) {
        cum += shifted_weight(c, target, shift, sigma) / denom;
        if (u < cum) return c;
    }
    return cells.back(); // absorb floating-point shortfall
}

double pair_likelihood(const SensorReading& reading, const GridPos& observer,
                       const GridPos& hyp_target, double sigma, int radius,
                       const GridDims& dims) {
    if (reading.has_value()) {
        return sensor_prob(*reading, observer, hyp_target, sigma, radius, dims);
    }
    return in_sensing_window(observer, hyp_target, radius) ? 0.0 : 1.0;
}

double joint_likelihood(const ScenarioSpec& s, AgentId observer, long t,
                        const Observation& obs, HypId h) {
    const GridPos q = s.actual_position(observer, t);
    const int radius = s.agents[observer].sensing_radius;
    double l = 1.0;
    for (AgentId j = 0; j < s.num_agents(); ++j) {
        if (j == observer) continue;
        const GridPos hyp_pos = s.instance_position(j, s.hypotheses.good_bit(h, j), t);
        l *= pair_likelihood(obs.readings[j], q, hyp_pos, s.sigma, radius, s.grid);
    }
    return l;
}

const SensorCache::Entry& SensorCache::denom_entry(const GridPos& observer,
                                                   const GridPos& target,
                                                   int radius) {
    // Grid coordinates fit in 12 bits each (scenario loading caps grids at
    // 4096 cells per side); pack cell pair + radius into one key.
    const std::uint64_t key =
        (static_cast<std::uint64_t>(observer.x & 0xFFF) << 52) |
        (static_cast<std::uint64_t>(observer.y & 0xFFF) << 40) |
        (static_cast<std::uint64_t>(target.x & 0xFFF) << 28) |
        (static_cast<std::uint64_t>(target.y & 0xFFF) << 16) |
        static_cast<std::uint64_t>(radius & 0xFFFF);
    auto it = denoms_.find(key);
    if (it != denoms_.end()) return it->second;

    const auto cells = sensing_window_cells(observer, radius, s_->grid);
    Entry e;
    e.shift = min_sq_dist(cells, target);
    for (const auto& c : cells) {
        e.denom += shifted_weight(c, target, e.shift, s_->sigma);
    }
    return denoms_.emplace(key, e).first->second;
}

double SensorCache::prob(const GridPos& reading, const GridPos& observer,
                         const GridPos& target, int radius) {
    const Entry& e = denom_entry(observer, target, radius);
    return shifted_weight(reading, target, e.shift, s_->sigma) / e.denom;
}

double SensorCache::pair_likelihood_cached(const SensorReading& reading,
                                           const GridPos& observer,
                                           const GridPos& hyp_target,
                                           int radius) {
    if (reading.has_value()) {
        return prob(*reading, observer, hyp_target, radius);
    }
    return in_sensing_window(observer, hyp_target, radius) ? 0.0 : 1.0;
}

std::vector<double> SensorCache::likelihood_vector(AgentId observer, long t,
                                                   const Observation& obs) {
    const ScenarioSpec& s = *s_;
    const GridPos q = s.actual_position(observer, t);
    const int radius = s.agents[observer].sensing_radius;
    const int n = s.num_agents();

    // Each target contributes one of two values depending on its bit in the
    // hypothesis label; evaluate both once, then combine per hypothesis.
    std::vector<double> lik_good(n, 1.0), lik_bad(n, 1.0);
    for (AgentId j = 0; j < n; ++j) {
        if (j == observer) continue;
        lik_good[j] = pair_likelihood_cached(obs.readings[j], q,
                                             s.instance_position(j, true, t), radius);
        lik_bad[j] = pair_likelihood_cached(obs.readings[j], q,
                                            s.instance_position(j, false, t), radius);
    }
    std::vector<double> out(s.hypotheses.count());
    for (HypId h = 0; h < s.hypotheses.count(); ++h) {
        double l = 1.0;
        for (AgentId j = 0; j < n; ++j) {
            if (j == observer) continue;
            l *= s.hypotheses.good_bit(h, j) ? lik_good[j] : lik_bad[j];
        }
        out[h] = l;
    }
    return out;
}

Observation SensorCache::observe(AgentId observer, long t,
                                 const std::vector<GridPos>& actual_positions) {
    const ScenarioSpec& s = *s_;
    Observation obs;
    obs.readings.resize(s.num_agents());
    const GridPos q = actual_positions[observer];
    const int radius = s.agents[observer].sensing_radius;
    for (AgentId j = 0; j < s.num_agents(); ++j) {
        if (j == observer) continue;
        auto rng = SplitMix64::stream(s.seed, static_cast<std::uint64_t>(observer),
                                      static_cast<std::uint64_t>(j),
                                      static_cast<std::uint64_t>(t));
        obs.readings[j] =
            sample_reading(rng, q, actual_positions[j], s.sigma, radius, s.grid);
    }
    return obs;
}

} // namespace dht
