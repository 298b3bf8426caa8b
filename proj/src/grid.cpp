#include "dht/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dht {

std::vector<GridPos> sensing_window_cells(const GridPos& center, int radius,
                                          const GridDims& dims) {
    std::vector<GridPos> cells;
    const int y0 = std::max(0, center.y - radius);
    const int y1 = std::min(dims.height - 1, center.y + radius);
    const int x0 = std::max(0, center.x - radius);
    const int x1 = std::min(dims.width - 1, center.x + radius);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            cells.push_back(GridPos{x, y});
        }
    }
    return cells;
}

MotionGraph MotionGraph::eight_connected() {
    return MotionGraph{};
}

MotionGraph MotionGraph::explicit_edges(std::vector<std::pair<GridPos, GridPos>> edges) {
    MotionGraph g;
    g.explicit_ = true;
    g.edges_.insert(edges.begin(), edges.end());
    return g;
}

bool MotionGraph::allows(const GridPos& from, const GridPos& to) const {
    if (!explicit_) {
        return chebyshev(from, to) <= 1; // eight neighbors or stay
    }
    return edges_.count({from, to}) > 0;
}

GridPos position_at(const std::vector<GridPos>& cycle, long t) {
    if (cycle.empty()) {
        throw std::invalid_argument("position_at: empty cycle");
    }
    if (t < 0) {
        throw std::invalid_argument("position_at: negative time");
    }
    return cycle[static_cast<std::size_t>(t) % cycle.size()];
}

AgentMask neighbors_of(AgentId i, const std::vector<GridPos>& positions,
                       const std::vector<int>& comm_radii) {
    AgentMask m = mask_bit(i);
    for (AgentId j = 0; j < static_cast<AgentId>(positions.size()); ++j) {
        if (j == i) continue;
        if (chebyshev(positions[i], positions[j]) <= comm_radii[j]) {
            m |= mask_bit(j);
        }
    }
    return m;
}

std::string validate_cycle(const std::vector<GridPos>& cycle,
                           const MotionGraph& motion, const GridDims& dims) {
    if (cycle.empty()) return "cycle is empty";
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        if (!dims.contains(cycle[k])) {
            return "cell " + std::to_string(k) + " (" + std::to_string(cycle[k].x) +
                   "," + std::to_string(cycle[k].y) + ") is off the grid";
        }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const GridPos& from = cycle[k];
        const GridPos& to = cycle[(k + 1) % cycle.size()];
        if (!motion.allows(from, to)) {
            return "step " + std::to_string(k) + " -> " +
                   std::to_string((k + 1) % cycle.size()) + " ((" +
                   std::to_string(from.x) + "," + std::to_string(from.y) + ") to (" +
                   std::to_string(to.x) + "," + std::to_string(to.y) +
                   ")) is not a legal move";
        }
    }
    return "";
}

} // namespace dht
