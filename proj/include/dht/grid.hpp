#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dht/types.hpp"

namespace dht {

struct GridPos {
    int x = 0;
    int y = 0;

    friend bool operator==(const GridPos& a, const GridPos& b) {
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const GridPos& a, const GridPos& b) { return !(a == b); }
    friend bool operator<(const GridPos& a, const GridPos& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

struct GridDims {
    int width = 0;
    int height = 0;

    bool contains(const GridPos& p) const {
        return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
    }

    friend bool operator==(const GridDims&, const GridDims&) = default;
};

// Chebyshev (L-infinity) distance; both communication and sensing ranges are
// square windows of this radius.
inline int chebyshev(const GridPos& a, const GridPos& b) {
    int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx > dy ? dx : dy;
}

// Squared Euclidean distance, used inside the sensor kernel.
inline double euclidean_sq(const GridPos& a, const GridPos& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline bool in_sensing_window(const GridPos& center, const GridPos& q, int radius) {
    return chebyshev(center, q) <= radius;
}

// All grid cells within Chebyshev `radius` of `center`, clipped to the grid,
// in row-major order (ascending y, then ascending x).  This order is part of
// the sampling contract: sensor readings are drawn by inverse-CDF over
// exactly this sequence.
std::vector<GridPos> sensing_window_cells(const GridPos& center, int radius,
                                          const GridDims& dims);

/**
 * The legal single-step moves.  The default graph allows the eight
 * surrounding cells plus staying put; scenarios may instead declare an
 * explicit edge list (edges are directed; include (c, c) to allow waiting
 * at c).
 */
class MotionGraph {
public:
    // Eight-connected moves plus stay-in-place.
    static MotionGraph eight_connected();

    static MotionGraph explicit_edges(std::vector<std::pair<GridPos, GridPos>> edges);

    bool is_explicit() const { return explicit_; }
    const std::set<std::pair<GridPos, GridPos>>& edges() const { return edges_; }

    bool allows(const GridPos& from, const GridPos& to) const;

    friend bool operator==(const MotionGraph&, const MotionGraph&) = default;

private:
    bool explicit_ = false;
    std::set<std::pair<GridPos, GridPos>> edges_;
};

/**
 * An agent's two declared periodic patrol routes: the cycle it follows when
 * good and the cycle it would follow when bad.  Positions repeat with period
 * = cycle length (the final step wraps to the front).
 */
struct StatePath {
    std::vector<GridPos> good_cycle;
    std::vector<GridPos> bad_cycle;

    friend bool operator==(const StatePath&, const StatePath&) = default;
};

// Position along a periodic cycle at time t (t >= 0).  The cycle must be
// non-empty.
GridPos position_at(const std::vector<GridPos>& cycle, long t);

/**
 * Receiver-oriented neighbor set: agent j is a neighbor of agent i at time t
 * iff i lies within j's communication window (so i can hear j's broadcast),
 * and every agent is always its own neighbor.  With uniform radii this is
 * symmetric.  Bit j of the result is set iff j is a neighbor of i.
 */
AgentMask neighbors_of(AgentId i, const std::vector<GridPos>& positions,
                       const std::vector<int>& comm_radii);

// Checks that consecutive cells (including the wrap from back to front) are
// legal moves and all cells lie on the grid.  Returns a human-readable
// problem description, or an empty string when the cycle is valid.
std::string validate_cycle(const std::vector<GridPos>& cycle,
                           const MotionGraph& motion, const GridDims& dims);

} // namespace dht
