#pragma once

#include <cstdint>
#include <vector>

#include "invtree/cluster.hpp"
#include "invtree/stats.hpp"

namespace invtree {

struct boundary_contact_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Neighbor lists of a cluster tree, built once so many walks can share it.
struct WalkEnvironment {
    const ClusterTree* tree;
    std::vector<std::int32_t> adjacency;  // children then parent, per vertex
    std::vector<std::int32_t> offset;     // CSR offsets, size V+1

    explicit WalkEnvironment(const ClusterTree& t);
    int degree(std::int32_t v) const { return offset[v + 1] - offset[v]; }
};

struct WalkSummary {
    std::int64_t steps = 0;
    std::int64_t range = 0;                  // |{X_0..X_k}|
    std::int64_t even_returns = 0;           // visits to the start at even steps > 0
    std::int32_t start = 0;
    std::int32_t final_vertex = 0;
    std::vector<std::int64_t> range_at;      // |R_k| at the requested checkpoints
    std::vector<std::int64_t> returns_at;    // 1 if X_k == start, at the requested checkpoints
};

/// Uniform-neighbor walk for `steps` steps. Throws boundary_contact_error if
/// the walk touches the height cap (the environment is too small; resample
/// with a larger H). Checkpoints, if given, must be increasing step indices.
WalkSummary walk(const WalkEnvironment& env, std::int32_t start, std::int64_t steps,
                 std::uint64_t seed, const std::vector<std::int64_t>& checkpoints = {});

/// First time the walk from the root reaches height n; the tree's height cap
/// must equal n so hitting the cap is the exit. Throws if the step budget
/// (default 100 n^3) is exceeded.
std::int64_t exit_time(const WalkEnvironment& env, int n, std::uint64_t seed,
                       std::int64_t step_budget = -1);

/// Ordinary least squares on (log x, log y); inputs must be positive with at
/// least 3 points.
LinFit fit_exponent(std::span<const double> x, std::span<const double> y);

/// Environment height for range/return runs of k_max steps: walks of that
/// length rarely climb past 8 k_max^{1/3} + 50.
int environment_height(std::int64_t k_max);

}  // namespace invtree
