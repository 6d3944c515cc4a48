#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invtree/stats.hpp"
#include "invtree/weight_chain.hpp"

namespace invtree {

/// Rooted spanning tree connecting the root to the prescribed vertices:
/// nodes are the root, the leaves and the branch points; each non-root node
/// carries the length of the segment down to its parent node (scaled t_v
/// summing to 1, or integer n_v summing to N).
struct SpanningGeometry {
    struct Node {
        std::string name;
        int parent;     // index into nodes; -1 for the root
        double t;       // scaled segment length
        long long n;    // integer segment length (0 until apportioned)
    };
    std::vector<Node> nodes;  // nodes[0] is the root "o"

    /// Parses the one-line-per-node format "id parent length" (root "o"
    /// implicit, '#' comments allowed). Scaled lengths are the given lengths
    /// normalized to total 1.
    static SpanningGeometry parse(const std::string& text);

    bool branches_at_root() const;
    std::size_t segment_count() const { return nodes.size() - 1; }
    long long total_edges() const;
    int find(const std::string& name) const;  // -1 if absent

    /// Fills integer lengths with total N by largest-remainder apportionment
    /// of N * t_v; every segment gets at least one edge.
    void apportion(long long N);
};

/// Value plus the root-branching diagnostic: geometries branching at the
/// root have limit exactly 0 and are flagged rather than rejected.
struct RpointValue {
    double value;
    bool root_branching;
};

/// Scaled-limit joint density of {leaves connected} and {backbone exits
/// segment v at offset s}: (s + m_{v-}^v) pi_v.
RpointValue limit_joint(const SpanningGeometry& geom, int v, double s);

/// Scaled limit of the normalized connection probability:
/// sum_v ((1/2) t_v^2 + t_v m_{v-}^v) pi_v.
RpointValue limit_rpoint(const SpanningGeometry& geom);

/// Conditional backbone-exit density on the scaled tree: limit_joint over
/// limit_rpoint; integrates to 1.
RpointValue backbone_density(const SpanningGeometry& geom, int v, double s);

enum class RpointMode { joint, summed };

/// Finite-N estimator, exact in each chain and Monte Carlo only over chains:
/// evaluates prod_w (sigma W-hat_{|w|})^{N_w^v} * (sigma W-hat_{|v-|+k})^{N_v^v + n_v - k}
/// per chain. Summed mode adds every boundary position (all k, all segments)
/// with its multiplicity and divides by (sigma-1) N. Joint mode takes a
/// single (segment, k).
McEstimate finite_rpoint(const SpanningGeometry& geom, const std::vector<WeightChain>& chains,
                         RpointMode mode, int v = -1, long long k = 0);

/// Ratio estimator of the scaled exit density at (segment v, offset k/N):
/// joint / summed over a shared chain set, with a delta-method SE.
McEstimate finite_exit_density(const SpanningGeometry& geom, const std::vector<WeightChain>& chains,
                               int v, long long k);

/// Critical-dressing counterpart in closed form: sigma^{N+1} P(all leaves
/// connected) = N(sigma-1) + sigma, backbone exit uniform over the boundary.
struct IicRpoint {
    double normalized;       // N(sigma-1) + sigma
    double exit_probability; // 1 / (N(sigma-1) + sigma)
};
IicRpoint iic_rpoint(long long N, int sigma);

}  // namespace invtree
