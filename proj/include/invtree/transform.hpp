#pragma once

#include <cstdint>

#include "invtree/stats.hpp"
#include "invtree/weight_chain.hpp"

namespace invtree {

/// Limits of the rescaled cluster sizes: C[n]/(rho n) and C[0,n]/(rho n^2)
/// for the invasion cluster, and their critical-dressing counterparts.
struct LimitMoments {
    static constexpr double gamma_mean = 1.0;
    static constexpr double gamma_second_moment = 5.0 / 3.0;
    static constexpr double gamma_hat_mean = 0.5;
    static constexpr double gamma_hat_second_moment = 25.0 / 72.0;
    static constexpr double iic_gamma_mean = 2.0;
    static constexpr double iic_gamma_second_moment = 6.0;
    static constexpr double iic_gamma_hat_mean = 1.0;
    static constexpr double iic_gamma_hat_second_moment = 4.0 / 3.0;
};

/// Height-slice generating-function recursion g_{m+1} = p[1 - (1-g_m)^sigma],
/// g_0 = 1 - e^{-tau/sigma}, iterated exactly in double precision. Requires
/// p <= p_c, tau >= 0.
double slice_g(const TreeParams& params, double p, double tau, long long m);

/// Logistic closed form of the slice ODE approximation,
/// g~(t) = g_0 e^{-delta t} / (1 + q g_0 (1 - e^{-delta t})) with
/// p = (1-delta)/sigma and q = ((1-delta)/delta) rho sigma; the delta = 0
/// limit is g_0/(1 + rho sigma g_0 t).
double slice_g_tilde(const TreeParams& params, double p, double tau, double t);

/// Volume recursion g_{m+1} = p[1 - e^{-tau}(1-g_m)^sigma], g_0 = 0.
double volume_g(const TreeParams& params, double p, double tau, long long m);

/// Parameters of the quadratic approximation to the volume recursion:
/// alpha = p sigma e^{-tau}, beta = (sigma-1) alpha,
/// D = sqrt((1-alpha)^2 + 2 beta p (1-e^{-tau})), C = (D+(1-alpha))/(D-(1-alpha)).
/// C is +inf at tau = 0.
struct VolumeQuad {
    double alpha;
    double beta;
    double D;
    double C;
};
VolumeQuad volume_quad_params(const TreeParams& params, double p, double tau);

/// Riccati closed form of the volume ODE approximation, evaluated in the
/// cancellation-free form 2p(1-e^{-tau})(1-e^{-Dt}) / ((D+y0) + (D-y0)e^{-Dt})
/// with y0 = 1 - alpha.
double volume_g_tilde(const TreeParams& params, double p, double tau, double t);

/// E(e^{-tau Gamma_n} | W) = e^{-tau/(rho n)} prod_{k<n} f_{n-k}(W-hat_k; tau/(rho n))^{sigma-1}
/// with f = 1 - g from the slice recursion. Exact given the chain.
double conditional_slice_laplace(const WeightChain& chain, long long n, double tau);

/// E(e^{-tau Gamma-hat_n} | W) = e^{-tau(n+1)/(rho n^2)} prod_{k<=n} f_{n-k}(W-hat_k; tau/(rho n^2))^{sigma-1}
/// with f from the volume recursion.
double conditional_volume_laplace(const WeightChain& chain, long long n, double tau);

/// Monte Carlo estimates of E(e^{-tau Gamma}) = E exp(-S(tau, L)) and
/// E(e^{-tau Gamma-hat}) = E exp(-S-hat(tau, L)) over sampled envelope paths.
McEstimate limit_laplace_gamma(double tau, std::size_t replicas, std::uint64_t seed);
McEstimate limit_laplace_gamma_hat(double tau, std::size_t replicas, std::uint64_t seed);

/// lim E(Gamma_{n1} Gamma_{n2}) = 1 + a(1+a)/3 for n1/n2 -> a in [0, 1].
double covariance_limit(double a);

/// Monte Carlo mean of n^2 / C[0,n] over sampled invasion clusters.
McEstimate theorem_1_9_statistic(const TreeParams& params, int n, std::size_t replicas,
                                 std::uint64_t seed, unsigned threads = 1);

}  // namespace invtree
