#pragma once

#include <bit>
#include <cstdint>

namespace dht {

using AgentId = int;
using HypId = int; // index into a HypothesisSet

// Agent sets are bitmasks (bit i = agent i), which caps a scenario at 64
// agents; scenario loading enforces the cap.  Set algebra on masks keeps the
// per-step source-coverage checks branch-free and deterministic.
using AgentMask = std::uint64_t;

inline constexpr int kMaxAgents = 64;

inline bool mask_test(AgentMask m, AgentId i) { return (m >> i) & 1ULL; }
inline AgentMask mask_bit(AgentId i) { return 1ULL << i; }
inline int mask_count(AgentMask m) { return std::popcount(m); }

} // namespace dht
