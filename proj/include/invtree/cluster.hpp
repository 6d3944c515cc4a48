#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "invtree/analytic.hpp"

namespace invtree {

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SampleBudget {
    std::size_t max_nodes = 50'000'000;
};

enum class ClusterKind { ipc, iic };

/// Finite truncation of a sampled cluster: flat arena of (parent, height,
/// backbone flag) plus per-height totals. The backbone is the unique
/// root-to-height-H path; exactly one backbone vertex per height.
struct ClusterTree {
    TreeParams params;
    int height_cap;
    ClusterKind kind;
    std::vector<std::int32_t> parent;  // -1 at the root
    std::vector<std::int32_t> height;
    std::vector<std::uint8_t> backbone;
    std::vector<std::int64_t> counts;  // counts[h] = vertices at height h, h = 0..H

    std::size_t size() const { return parent.size(); }
    std::vector<std::int64_t> cumulative() const;  // C[0,n] for n = 0..H
};

/// Backbone dressed with sigma-1 independent branches per backbone height k,
/// each grown with per-edge open probability dual(W_k) and truncated at H.
ClusterTree sample_ipc(const TreeParams& params, int H, std::uint64_t seed,
                       const SampleBudget& budget = {});

/// Same construction with every branch critical (per-edge probability p_c).
ClusterTree sample_iic(const TreeParams& params, int H, std::uint64_t seed,
                       const SampleBudget& budget = {});

/// Shared backbone; each potential branch edge takes one uniform u and is
/// open in the critical tree iff u < p_c, in the invasion tree iff
/// u < dual(W_k). Exploration follows the critical tree, so the invasion
/// tree is a subgraph for every seed.
std::pair<ClusterTree, ClusterTree> sample_coupled(const TreeParams& params, int H,
                                                   std::uint64_t seed,
                                                   const SampleBudget& budget = {});

/// Per-height counts restricted to vertices whose most recent backbone
/// ancestor sits at height >= k_floor. k_floor = 0 returns counts itself.
std::vector<std::int64_t> slice_counts(const ClusterTree& tree, int k_floor);

struct InvasionEdge {
    std::int64_t child;
    std::int64_t parent;
    std::int32_t height;  // of the child vertex
    double weight;
    std::int64_t step;
};

/// Record of a direct invasion run. The window statistics describe the
/// invaded set restricted to heights <= window; "stabilized" is the
/// heuristic verdict that this restricted set is final (a long quiet
/// stretch below the cheapest remaining low boundary edge, with the
/// frontier far above the window).
struct InvasionTrace {
    TreeParams params;
    std::int64_t steps = 0;
    std::vector<InvasionEdge> edges;  // filled only when the trace is recorded
    std::int32_t frontier_height = 0;
    double max_accepted_weight = 0.0;
    int window = 0;
    std::vector<std::int64_t> window_counts;  // per-height, 0..window
    std::int64_t count_below_window = 0;      // vertices at heights <= window, root included
    double min_boundary_weight_window = 0.0;
    std::int64_t last_window_change_step = 0;
    std::int64_t boundary_size = 0;
    bool stabilized = false;
};

/// Classical invasion from the root: repeatedly accepts the boundary edge of
/// minimum weight, weights drawn lazily as edges enter the boundary.
InvasionTrace invade_direct(const TreeParams& params, std::int64_t max_steps, std::uint64_t seed,
                            int height_window, bool record_trace = false,
                            const SampleBudget& budget = {});

/// Draws the invaded tree; the i-th added edge gets hue i/M on the color
/// wheel, children ordered left to right by vertex id.
void render_svg(const InvasionTrace& trace, std::ostream& out);
std::string render_svg(const InvasionTrace& trace);

}  // namespace invtree
