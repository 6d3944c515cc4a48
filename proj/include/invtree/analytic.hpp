#pragma once

#include <stdexcept>

namespace invtree {

/// Branching number of the rooted regular tree and the constants derived
/// from it. Every vertex has sigma forward children; the percolation
/// threshold is p_c = 1/sigma and rho = (sigma-1)/(2 sigma).
struct TreeParams {
    int sigma;
    double p_c;
    double rho;

    explicit TreeParams(int sigma_)
        : sigma(sigma_), p_c(1.0 / sigma_), rho((sigma_ - 1) / (2.0 * sigma_)) {
        if (sigma_ < 2) throw std::invalid_argument("TreeParams: sigma must be >= 2");
    }
};

/// Percolation probability from the root, theta(p) = 1 - zeta(p)^sigma.
/// Zero on [0, p_c], strictly increasing and continuous on [p_c, 1].
double theta(const TreeParams& params, double p);

/// One-branch extinction probability: the smallest fixed point in [0,1] of
/// x -> 1 - p + p x^sigma. Equals 1 for p <= p_c.
double zeta(const TreeParams& params, double p);

/// zeta'(p) for p in [p_c, 1). At p_c (and within 1e-9 of it) returns the
/// analytic right-derivative limit -2 sigma/(sigma-1), bypassing the 0/0 form.
double zeta_prime(const TreeParams& params, double p);

/// Jump-rate function R(u) = 1/(-zeta'(u)), u in [p_c, 1). Nondecreasing;
/// R(p_c) = rho. Not defined at u = 1 (the chain never reaches it).
double jump_rate(const TreeParams& params, double u);

/// Duality map p -> p zeta(p)^(sigma-1) from [p_c, 1] onto [0, p_c].
/// A supercritical cluster conditioned finite has the law of a subcritical
/// cluster at the dual parameter. For sigma = 2 this is exactly 1 - p.
double dual(const TreeParams& params, double p);

/// Unique p in (p_c, 1] with theta(p) = u, for u in (0, 1]. Used to draw
/// from the law P(X <= u) = theta(u) by inversion.
double theta_inverse(const TreeParams& params, double u);

}  // namespace invtree
