#include "invtree/walk.hpp"

#include <cmath>

#include "invtree/rng.hpp"

namespace invtree {

WalkEnvironment::WalkEnvironment(const ClusterTree& t) : tree(&t) {
    const std::size_t v_count = t.size();
    offset.assign(v_count + 1, 0);
    for (std::size_t v = 1; v < v_count; ++v) ++offset[static_cast<std::size_t>(t.parent[v]) + 1];
    for (std::size_t v = 1; v < v_count; ++v) ++offset[v + 1];  // slot for own parent
    for (std::size_t v = 0; v < v_count; ++v) offset[v + 1] += offset[v];
    adjacency.assign(static_cast<std::size_t>(offset[v_count]), -1);
    std::vector<std::int32_t> cursor(offset.begin(), offset.end() - 1);
    for (std::size_t v = 1; v < v_count; ++v)
        adjacency[static_cast<std::size_t>(cursor[static_cast<std::size_t>(t.parent[v])]++)] =
            static_cast<std::int32_t>(v);
    for (std::size_t v = 1; v < v_count; ++v)
        adjacency[static_cast<std::size_t>(cursor[v]++)] = t.parent[v];
}

WalkSummary walk(const WalkEnvironment& env, std::int32_t start, std::int64_t steps,
                 std::uint64_t seed, const std::vector<std::int64_t>& checkpoints) {
    if (start < 0 || static_cast<std::size_t>(start) >= env.tree->size())
        throw std::invalid_argument("walk: start vertex outside the tree");
    Rng rng(seed);
    WalkSummary out;
    out.start = start;
    out.steps = steps;
    std::vector<std::uint8_t> visited(env.tree->size(), 0);
    visited[static_cast<std::size_t>(start)] = 1;
    out.range = 1;
    std::int32_t x = start;
    std::size_t next_cp = 0;
    const std::int32_t cap = env.tree->height_cap;
    for (std::int64_t k = 1; k <= steps; ++k) {
        const int deg = env.degree(x);
        x = env.adjacency[static_cast<std::size_t>(env.offset[x]) +
                          rng.below(static_cast<std::uint32_t>(deg))];
        if (env.tree->height[static_cast<std::size_t>(x)] >= cap)
            throw boundary_contact_error("walk: touched the height cap");
        if (!visited[static_cast<std::size_t>(x)]) {
            visited[static_cast<std::size_t>(x)] = 1;
            ++out.range;
        }
        if (x == start && (k & 1) == 0) ++out.even_returns;
        while (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
            out.range_at.push_back(out.range);
            out.returns_at.push_back(x == start ? 1 : 0);
            ++next_cp;
        }
    }
    out.final_vertex = x;
    return out;
}

std::int64_t exit_time(const WalkEnvironment& env, int n, std::uint64_t seed,
                       std::int64_t step_budget) {
    if (env.tree->height_cap != n)
        throw std::invalid_argument("exit_time: tree height cap must equal n");
    if (step_budget < 0)
        step_budget = 100LL * static_cast<std::int64_t>(n) * n * n;
    Rng rng(seed);
    std::int32_t x = 0;
    for (std::int64_t k = 1; k <= step_budget; ++k) {
        const int deg = env.degree(x);
        x = env.adjacency[static_cast<std::size_t>(env.offset[x]) +
                          rng.below(static_cast<std::uint32_t>(deg))];
        if (env.tree->height[static_cast<std::size_t>(x)] == n) return k;
    }
    throw std::runtime_error("exit_time: step budget exceeded");
}

LinFit fit_exponent(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fit_exponent: need >= 3 points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0))
            throw std::invalid_argument("fit_exponent: coordinates must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return ols(lx, ly);
}

int environment_height(std::int64_t k_max) {
    return static_cast<int>(std::ceil(8.0 * std::cbrt(static_cast<double>(k_max)))) + 50;
}

}  // namespace invtree
