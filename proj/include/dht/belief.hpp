#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace dht {

// Tolerance used when checking that a belief vector is normalized.
inline constexpr double kNormalizationTol = 1e-9;

/**
 * A belief vector: one probability per hypothesis.
 *
 * A Belief may be held in "raw" form (non-negative entries, arbitrary sum,
 * e.g. mid-update fusion results) or in normalized form (entries in [0,1]
 * summing to 1 within kNormalizationTol).  Interfaces that require the
 * normalized form say so; use is_normalized() to check.
 */
class Belief {
public:
    Belief() = default;

    // Takes ownership of `probs`.  Throws std::invalid_argument if any entry
    // is negative or non-finite.
    explicit Belief(std::vector<double> probs);

    // Uniform distribution over `count` hypotheses (count >= 1).
    static Belief uniform(std::size_t count);

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    double& operator[](std::size_t i) { return p_[i]; }
    const std::vector<double>& probs() const { return p_; }

    double sum() const;

    // Index of the largest entry (lowest index wins ties).
    std::size_t argmax() const;

    bool is_normalized(double tol = kNormalizationTol) const;

    friend bool operator==(const Belief& a, const Belief& b) { return a.p_ == b.p_; }
    friend bool operator!=(const Belief& a, const Belief& b) { return !(a == b); }

private:
    std::vector<double> p_;
};

/**
 * Rescales a raw non-negative vector to sum to 1.
 *
 * Throws std::domain_error if the vector sums to zero (nothing to normalize;
 * an all-zero belief means every hypothesis was ruled out, which is a logic
 * error upstream) and std::invalid_argument on an empty vector.
 */
Belief normalize(const Belief& raw);

/**
 * Kullback-Leibler divergence D(p || q) = sum_i p_i * ln(p_i / q_i), in nats.
 *
 * Terms with p_i == 0 contribute zero.  If p_i > 0 while q_i == 0 the
 * divergence is +infinity (q fails absolute continuity w.r.t. p); this is a
 * legitimate value, not an error.  Throws std::invalid_argument if the
 * vectors differ in length or are empty.
 *
 * Both arguments must be normalized distributions.
 */
double kl_divergence(const Belief& p, const Belief& q);

} // namespace dht
