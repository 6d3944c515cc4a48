#include "invtree/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <sstream>

#include "invtree/rng.hpp"
#include "invtree/weight_chain.hpp"

namespace invtree {

std::vector<std::int64_t> ClusterTree::cumulative() const {
    std::vector<std::int64_t> cum(counts.size());
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        acc += counts[i];
        cum[i] = acc;
    }
    return cum;
}

namespace {

struct Builder {
    ClusterTree tree;
    const SampleBudget* budget;

    Builder(const TreeParams& params, int H, ClusterKind kind, const SampleBudget& b)
        : tree{params, H, kind, {}, {}, {}, std::vector<std::int64_t>(H + 1, 0)}, budget(&b) {
        const std::size_t hint = std::min<std::size_t>(
            budget->max_nodes, 64 + static_cast<std::size_t>(params.rho * double(H) * double(H)));
        tree.parent.reserve(hint);
        tree.height.reserve(hint);
        tree.backbone.reserve(hint);
    }

    std::int32_t add(std::int32_t parent, std::int32_t h, bool bb) {
        if (tree.size() >= budget->max_nodes) throw budget_error("cluster sampler: node budget exceeded");
        tree.parent.push_back(parent);
        tree.height.push_back(h);
        tree.backbone.push_back(bb ? 1 : 0);
        ++tree.counts[static_cast<std::size_t>(h)];
        return static_cast<std::int32_t>(tree.size() - 1);
    }
};

// Grows one branch hanging below `origin` (a backbone vertex at height h0):
// the first edge and every deeper edge open independently with probability p.
void grow_branch(Builder& b, Rng& rng, std::int32_t origin, std::int32_t h0, double p, int H) {
    if (h0 >= H || rng.uniform() >= p) return;
    const int sigma = b.tree.params.sigma;
    std::vector<std::int32_t> stack;
    stack.push_back(b.add(origin, h0 + 1, false));
    while (!stack.empty()) {
        const std::int32_t v = stack.back();
        stack.pop_back();
        const std::int32_t h = b.tree.height[static_cast<std::size_t>(v)];
        if (h >= H) continue;
        for (int c = 0; c < sigma; ++c)
            if (rng.uniform() < p) stack.push_back(b.add(v, h + 1, false));
    }
}

ClusterTree sample_structural(const TreeParams& params, int H, std::uint64_t seed,
                              ClusterKind kind, const SampleBudget& budget) {
    if (H < 1) throw std::domain_error("structural sampler: H must be >= 1");
    const WeightChain chain = sample_chain(params, static_cast<std::size_t>(H) - 1,
                                           derive_stream(seed, "cluster.chain", 0));
    Rng rng(derive_stream(seed, "cluster.branches", 0));
    Builder b(params, H, kind, budget);
    std::int32_t bb = b.add(-1, 0, true);
    for (int k = 0; k < H; ++k) {
        const double p =
            kind == ClusterKind::iic ? params.p_c : dual(params, chain.w[static_cast<std::size_t>(k)]);
        for (int j = 0; j < params.sigma - 1; ++j) grow_branch(b, rng, bb, k, p, H);
        bb = b.add(bb, k + 1, true);
    }
    return std::move(b.tree);
}

}  // namespace

ClusterTree sample_ipc(const TreeParams& params, int H, std::uint64_t seed,
                       const SampleBudget& budget) {
    return sample_structural(params, H, seed, ClusterKind::ipc, budget);
}

ClusterTree sample_iic(const TreeParams& params, int H, std::uint64_t seed,
                       const SampleBudget& budget) {
    return sample_structural(params, H, seed, ClusterKind::iic, budget);
}

std::pair<ClusterTree, ClusterTree> sample_coupled(const TreeParams& params, int H,
                                                   std::uint64_t seed, const SampleBudget& budget) {
    if (H < 1) throw std::domain_error("sample_coupled: H must be >= 1");
    const WeightChain chain =
        sample_chain(params, static_cast<std::size_t>(H) - 1, derive_stream(seed, "cluster.chain", 0));
    Rng rng(derive_stream(seed, "cluster.branches", 0));

    Builder iic(params, H, ClusterKind::iic, budget);
    Builder ipc(params, H, ClusterKind::ipc, budget);
    // in_ipc[v] for vertices of the critical tree; ipc_index maps them over.
    std::vector<std::int32_t> ipc_index;

    std::int32_t bb = iic.add(-1, 0, true);
    ipc_index.push_back(ipc.add(-1, 0, true));

    std::vector<std::int32_t> stack;
    for (int k = 0; k < H; ++k) {
        const double p_hat = dual(params, chain.w[static_cast<std::size_t>(k)]);
        for (int j = 0; j < params.sigma - 1; ++j) {
            // Branch root edge.
            {
                const double u = rng.uniform();
                if (u < params.p_c) {
                    const std::int32_t v = iic.add(bb, k + 1, false);
                    ipc_index.push_back(u < p_hat ? ipc.add(ipc_index[static_cast<std::size_t>(bb)],
                                                            k + 1, false)
                                                  : -1);
                    if (k + 1 < H) stack.push_back(v);
                }
            }
            while (!stack.empty()) {
                const std::int32_t v = stack.back();
                stack.pop_back();
                const std::int32_t h = iic.tree.height[static_cast<std::size_t>(v)];
                const std::int32_t vi = ipc_index[static_cast<std::size_t>(v)];
                for (int c = 0; c < params.sigma; ++c) {
                    const double u = rng.uniform();
                    if (u >= params.p_c) continue;
                    const std::int32_t w = iic.add(v, h + 1, false);
                    ipc_index.push_back(
                        (vi >= 0 && u < p_hat) ? ipc.add(vi, h + 1, false) : -1);
                    if (h + 1 < H) stack.push_back(w);
                }
            }
        }
        const std::int32_t parent_bb = bb;
        bb = iic.add(parent_bb, k + 1, true);
        ipc_index.push_back(ipc.add(ipc_index[static_cast<std::size_t>(parent_bb)], k + 1, true));
    }
    return {std::move(ipc.tree), std::move(iic.tree)};
}

std::vector<std::int64_t> slice_counts(const ClusterTree& tree, int k_floor) {
    if (k_floor < 0 || k_floor > tree.height_cap)
        throw std::domain_error("slice_counts: k_floor outside [0, H]");
    std::vector<std::int64_t> out(tree.counts.size(), 0);
    // Branch origin height per vertex; parents precede children in the arena.
    std::vector<std::int32_t> origin(tree.size());
    for (std::size_t v = 0; v < tree.size(); ++v) {
        origin[v] = tree.backbone[v] ? tree.height[v]
                                     : origin[static_cast<std::size_t>(tree.parent[v])];
        if (origin[v] >= k_floor) ++out[static_cast<std::size_t>(tree.height[v])];
    }
    return out;
}

namespace {

struct BoundaryEdge {
    double weight;
    std::int32_t height;  // of the child vertex
    std::int64_t child;
    std::int64_t parent;
    bool operator>(const BoundaryEdge& o) const { return weight > o.weight; }
};

}  // namespace

InvasionTrace invade_direct(const TreeParams& params, std::int64_t max_steps, std::uint64_t seed,
                            int height_window, bool record_trace, const SampleBudget& budget) {
    if (max_steps < 1) throw std::domain_error("invade_direct: max_steps must be >= 1");
    if (height_window < 0) throw std::domain_error("invade_direct: height_window must be >= 0");
    Rng rng(seed);

    std::priority_queue<BoundaryEdge, std::vector<BoundaryEdge>, std::greater<>> boundary;
    // Low boundary edges (child height <= window) mirrored for the
    // stabilization verdict; lazily deleted as they get invaded.
    std::priority_queue<std::pair<double, std::int64_t>, std::vector<std::pair<double, std::int64_t>>,
                        std::greater<>>
        low_boundary;
    std::vector<std::uint8_t> invaded_edge;  // by child id; edge ids = child ids

    InvasionTrace trace{params};
    trace.window = height_window;
    trace.window_counts.assign(static_cast<std::size_t>(height_window) + 1, 0);
    trace.window_counts[0] = 1;
    trace.count_below_window = 1;

    std::int64_t next_id = 1;
    auto open_boundary = [&](std::int64_t parent, std::int32_t parent_height) {
        for (int c = 0; c < params.sigma; ++c) {
            const BoundaryEdge e{rng.uniform(), parent_height + 1, next_id++, parent};
            boundary.push(e);
            if (e.height <= height_window) {
                low_boundary.emplace(e.weight, e.child);
                if (static_cast<std::size_t>(e.child) >= invaded_edge.size())
                    invaded_edge.resize(static_cast<std::size_t>(e.child) + 1, 0);
            }
        }
    };
    open_boundary(0, 0);

    const std::int64_t quiet_len = max_steps / 2;
    double quiet_max = 0.0;  // max accepted weight among the last quiet_len steps
    if (record_trace) trace.edges.reserve(static_cast<std::size_t>(max_steps));

    for (std::int64_t step = 0; step < max_steps; ++step) {
        if (static_cast<std::size_t>(next_id) > budget->max_nodes)
            throw budget_error("invade_direct: node budget exceeded");
        const BoundaryEdge e = boundary.top();
        boundary.pop();
        trace.max_accepted_weight = std::max(trace.max_accepted_weight, e.weight);
        if (step >= max_steps - quiet_len) quiet_max = std::max(quiet_max, e.weight);
        trace.frontier_height = std::max(trace.frontier_height, e.height);
        if (e.height <= height_window) {
            ++trace.window_counts[static_cast<std::size_t>(e.height)];
            ++trace.count_below_window;
            trace.last_window_change_step = step + 1;
            invaded_edge[static_cast<std::size_t>(e.child)] = 1;
        }
        if (record_trace) trace.edges.push_back({e.child, e.parent, e.height, e.weight, step + 1});
        open_boundary(e.child, e.height);
    }
    trace.steps = max_steps;
    trace.boundary_size = static_cast<std::int64_t>(boundary.size());

    while (!low_boundary.empty() &&
           invaded_edge[static_cast<std::size_t>(low_boundary.top().second)])
        low_boundary.pop();
    trace.min_boundary_weight_window =
        low_boundary.empty() ? 1.0 : low_boundary.top().first;
    trace.stabilized = trace.frontier_height >= 4 * height_window &&
                       quiet_max < trace.min_boundary_weight_window;
    return trace;
}

namespace {

void hue_to_rgb(double hue, int rgb[3]) {
    // hue in [0,1] around the wheel red -> yellow -> green -> cyan -> blue -> purple -> red
    const double h = 6.0 * (hue - std::floor(hue));
    const int i = static_cast<int>(h);
    const double f = h - i;
    const int q = static_cast<int>(255.0 * (1.0 - f));
    const int t = static_cast<int>(255.0 * f);
    switch (i % 6) {
        case 0: rgb[0] = 255; rgb[1] = t;   rgb[2] = 0;   break;
        case 1: rgb[0] = q;   rgb[1] = 255; rgb[2] = 0;   break;
        case 2: rgb[0] = 0;   rgb[1] = 255; rgb[2] = t;   break;
        case 3: rgb[0] = 0;   rgb[1] = q;   rgb[2] = 255; break;
        case 4: rgb[0] = t;   rgb[1] = 0;   rgb[2] = 255; break;
        default: rgb[0] = 255; rgb[1] = 0;  rgb[2] = q;   break;
    }
}

}  // namespace

void render_svg(const InvasionTrace& trace, std::ostream& out) {
    if (trace.edges.empty()) throw std::invalid_argument("render_svg: trace has no recorded edges");

    // Children sorted by id under each parent; leaves get consecutive x slots,
    // interior vertices the midpoint of their children.
    const std::size_t m = trace.edges.size();
    std::vector<std::int64_t> ids{0};
    std::vector<std::int32_t> heights{0};
    ids.reserve(m + 1);
    for (const auto& e : trace.edges) {
        ids.push_back(e.child);
        heights.push_back(e.height);
    }
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::int64_t> sorted_ids = ids;
    std::sort(sorted_ids.begin(), sorted_ids.end());
    auto index_of = [&](std::int64_t id) {
        return static_cast<std::size_t>(
            std::lower_bound(sorted_ids.begin(), sorted_ids.end(), id) - sorted_ids.begin());
    };
    std::vector<std::vector<std::size_t>> children(ids.size());
    std::vector<std::size_t> edge_child_idx(m), edge_parent_idx(m);
    for (std::size_t i = 0; i < m; ++i) {
        edge_child_idx[i] = index_of(trace.edges[i].child);
        edge_parent_idx[i] = index_of(trace.edges[i].parent);
        children[edge_parent_idx[i]].push_back(edge_child_idx[i]);
    }
    for (auto& c : children) std::sort(c.begin(), c.end());

    std::vector<double> x(ids.size(), 0.0);
    double next_leaf = 0.0;
    // Post-order over the sorted-id arena via explicit stack.
    std::vector<std::pair<std::size_t, std::size_t>> st{{index_of(0), 0}};
    while (!st.empty()) {
        auto& [v, ci] = st.back();
        if (children[v].empty()) {
            x[v] = next_leaf++;
            st.pop_back();
        } else if (ci < children[v].size()) {
            st.emplace_back(children[v][ci++], 0);
        } else {
            x[v] = 0.5 * (x[children[v].front()] + x[children[v].back()]);
            st.pop_back();
        }
    }

    std::int32_t max_h = 1;
    for (auto h : heights) max_h = std::max(max_h, h);
    const double width = 1000.0, height_px = 700.0, margin = 10.0;
    const double xs = next_leaf > 1 ? (width - 2 * margin) / (next_leaf - 1) : 0.0;
    const double ys = (height_px - 2 * margin) / max_h;
    std::vector<std::int32_t> node_height(ids.size(), 0);
    for (std::size_t i = 0; i < m; ++i)
        node_height[edge_child_idx[i]] = trace.edges[i].height;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height_px << "\" viewBox=\"0 0 " << width << " " << height_px << "\">\n";
    out << "<g stroke-width=\"1.2\" fill=\"none\">\n";
    char buf[256];
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t c = edge_child_idx[i], p = edge_parent_idx[i];
        int rgb[3];
        hue_to_rgb(m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.0, rgb);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                      "stroke=\"rgb(%d,%d,%d)\"/>\n",
                      margin + x[p] * xs, height_px - margin - node_height[p] * ys,
                      margin + x[c] * xs, height_px - margin - node_height[c] * ys, rgb[0], rgb[1],
                      rgb[2]);
        out << buf;
    }
    out << "</g>\n</svg>\n";
}

std::string render_svg(const InvasionTrace& trace) {
    std::ostringstream oss;
    render_svg(trace, oss);
    return oss.str();
}

}  // namespace invtree
