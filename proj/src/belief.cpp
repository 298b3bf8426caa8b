#include "dht/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dht {

Belief::Belief(std::vector<double> probs) : p_(std::move(probs)) {
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (!std::isfinite(p_[i]) || p_[i] < 0.0) {
            throw std::invalid_argument("belief entry " + std::to_string(i) +
                                        " is negative or non-finite");
        }
    }
}

Belief Belief::uniform(std::size_t count) {
    if (count == 0) {
        throw std::invalid_argument("uniform belief needs at least one hypothesis");
    }
    return Belief(std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

double Belief::sum() const {
    return std::accumulate(p_.begin(), p_.end(), 0.0);
}

std::size_t Belief::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(p_.begin(), p_.end()) - p_.begin());
}

bool Belief::is_normalized(double tol) const {
    if (p_.empty()) return false;
    for (double v : p_) {
        if (v < 0.0 || v > 1.0 + tol) return false;
    }
    return std::abs(sum() - 1.0) <= tol;
}

Belief normalize(const Belief& raw) {
    if (raw.size() == 0) {
        throw std::invalid_argument("cannot normalize an empty belief");
    }
    const double total = raw.sum();
    if (total <= 0.0) {
        throw std::domain_error("cannot normalize a belief that sums to zero: "
                                "every hypothesis has been ruled out");
    }
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out[i] = raw[i] / total;
    }
    return Belief(std::move(out));
}

double kl_divergence(const Belief& p, const Belief& q) {
    if (p.size() == 0 || p.size() != q.size()) {
        throw std::invalid_argument("kl_divergence requires two non-empty "
                                    "distributions of equal length");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue; // 0 * log(0/q) := 0
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        d += p[i] * std::log(p[i] / q[i]);
    }
    return d;
}

} // namespace dht
