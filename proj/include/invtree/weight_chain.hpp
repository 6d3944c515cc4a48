#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "invtree/analytic.hpp"

namespace invtree {

/// Realized forward-maximal-weight sequence along the backbone.
/// Nonincreasing, strictly above p_c for every k.
struct WeightChain {
    TreeParams params;
    std::vector<double> w;  // W_0 .. W_n
    std::uint64_t seed;
};

/// Image of a WeightChain under the duality map: nondecreasing, below p_c.
struct DualChain {
    TreeParams params;
    std::vector<double> w_hat;
};

/// z_k = k (sigma W_k - 1) for k = 1..n, together with the Y-chain
/// Y_k = rho theta(W_k) for k = 0..n.
struct RescaledChain {
    std::vector<double> z;
    std::vector<double> y;
};

struct CoupledChains {
    std::vector<double> w;
    std::vector<double> w_prime;
    long long coalesce_step;  // first k with W_k == W'_k, or -1 if none within n
};

/// Draws the chain: W_0 from the law P(W_0 <= u) = theta(u) (or the given
/// conditioned start), then
///   W_{k+1} = W_k             with probability 1 - R(W_k),
///   W_{k+1} = W_k /\ X_{k+1}  with probability R(W_k),
/// with X ~ theta-law. Two uniforms are consumed per step regardless of the
/// branch taken, so coupled samplers can share the stream.
WeightChain sample_chain(const TreeParams& params, std::size_t n, std::uint64_t seed,
                         std::optional<double> w0 = std::nullopt);

DualChain dualize(const WeightChain& chain);

RescaledChain rescale(const WeightChain& chain);

/// Jump probability of the Y-chain, q(y) = (y/rho) R(theta^{-1}(y/rho)) for
/// y in (0, rho]. At y = rho the rate is evaluated by its continuous limit
/// R(1) = 1.
double q_of_y(const TreeParams& params, double y);

/// The Y-chain sampled directly in y-space from the same uniform stream as
/// sample_chain(params, n, seed): stays with probability 1 - R, else takes
/// min(y, rho u). Step by step this equals rho theta(W_k) up to roundoff.
std::vector<double> sample_y_chain(const TreeParams& params, std::size_t n, std::uint64_t seed);

/// Two chains with independent starts driven by a shared (u, X) stream; each
/// jumps iff u < R(own value), so the higher-valued chain (larger R) jumps
/// whenever the lower one does. A shared accepted X below both values makes
/// the trajectories identical from then on.
CoupledChains couple_chains(const TreeParams& params, std::size_t n, std::uint64_t seed);

}  // namespace invtree
