#include "invtree/analytic.hpp"

#include <cmath>
#include <string>

namespace invtree {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

void check_unit_interval(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + ": p outside [0,1]");
}

// Fixed-point residual of the extinction probability: g(x) = 1 - p + p x^sigma - x.
double residual(int sigma, double p, double x) { return 1.0 - p + p * ipow(x, sigma) - x; }

}  // namespace

double zeta(const TreeParams& params, double p) {
    check_unit_interval(p, "zeta");
    if (p <= params.p_c) return 1.0;
    if (p == 1.0) return 0.0;

    // Bisection on [0, 1-1e-15] for the smallest fixed point of
    // x -> 1 - p + p x^sigma, then Newton refinement. The map has at most
    // two fixed points in [0,1]; the smaller one is the extinction
    // probability and the residual changes sign exactly once below it.
    double lo = 0.0, hi = 1.0 - 1e-15;
    if (residual(params.sigma, p, hi) >= 0.0) return 1.0;  // merged roots at p ~ p_c
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (residual(params.sigma, p, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double f = residual(params.sigma, p, x);
        const double fp = p * params.sigma * ipow(x, params.sigma - 1) - 1.0;
        if (fp == 0.0) break;
        const double next = x - f / fp;
        if (!(next >= 0.0 && next <= 1.0)) break;
        x = next;
    }
    return x;
}

double theta(const TreeParams& params, double p) {
    check_unit_interval(p, "theta");
    if (p <= params.p_c) return 0.0;
    const double z = zeta(params, p);
    return 1.0 - ipow(z, params.sigma);
}

double zeta_prime(const TreeParams& params, double p) {
    if (!(p >= params.p_c && p < 1.0)) throw std::domain_error("zeta_prime: p outside [p_c, 1)");
    // Guard band around p_c: the exact expression is 0/0 there; the analytic
    // limit of the right-derivative is -2 sigma/(sigma-1).
    if (p - params.p_c < 1e-9) return -2.0 * params.sigma / (params.sigma - 1);
    const double z = zeta(params, p);
    const double th = 1.0 - ipow(z, params.sigma);
    const double denom = 1.0 - p * params.sigma * ipow(z, params.sigma - 1);
    return -th / denom;
}

double jump_rate(const TreeParams& params, double u) { return 1.0 / (-zeta_prime(params, u)); }

double dual(const TreeParams& params, double p) {
    if (!(p >= params.p_c && p <= 1.0)) throw std::domain_error("dual: p outside [p_c, 1]");
    return p * ipow(zeta(params, p), params.sigma - 1);
}

double theta_inverse(const TreeParams& params, double u) {
    if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("theta_inverse: u outside (0, 1]");
    // theta(p) = u is equivalent to zeta(p) = (1-u)^(1/sigma) =: z, and the
    // fixed-point relation inverts in closed form to p = (1-z)/(1-z^sigma)
    // = 1 / (1 + z + ... + z^(sigma-1)), exact for every sigma.
    const double z = std::pow(1.0 - u, 1.0 / params.sigma);
    double denom = 1.0;
    double zp = 1.0;
    for (int j = 1; j < params.sigma; ++j) {
        zp *= z;
        denom += zp;
    }
    return 1.0 / denom;
}

}  // namespace invtree
