#include "invtree/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "invtree/cluster.hpp"
#include "invtree/envelope.hpp"
#include "invtree/parallel.hpp"
#include "invtree/rng.hpp"

namespace invtree {

namespace {

void check_subcritical(const TreeParams& params, double p, double tau) {
    if (!(p >= 0.0 && p <= params.p_c)) throw std::domain_error("recursion: need p <= p_c");
    if (!(tau >= 0.0)) throw std::domain_error("recursion: need tau >= 0");
}

// 1 - (1-g)^sigma expanded as g * sum_j (1-g)^j to avoid the cancellation in
// the direct form when g is tiny.
double one_minus_pow(double g, int sigma) {
    const double c = 1.0 - g;
    double sum = 1.0, cp = 1.0;
    for (int j = 1; j < sigma; ++j) {
        cp *= c;
        sum += cp;
    }
    return g * sum;
}

}  // namespace

double slice_g(const TreeParams& params, double p, double tau, long long m) {
    check_subcritical(params, p, tau);
    double g = -std::expm1(-tau / params.sigma);
    for (long long i = 0; i < m; ++i) g = p * one_minus_pow(g, params.sigma);
    return g;
}

double slice_g_tilde(const TreeParams& params, double p, double tau, double t) {
    check_subcritical(params, p, tau);
    const double delta = 1.0 - params.sigma * p;
    const double g0 = -std::expm1(-tau / params.sigma);
    // q g0 (1 - e^{-delta t}) = rho sigma (1-delta) g0 * (1-e^{-delta t})/delta,
    // with the last factor -> t as delta -> 0.
    const double ramp = delta == 0.0 ? t : -std::expm1(-delta * t) / delta;
    return g0 * std::exp(-delta * t) /
           (1.0 + params.rho * params.sigma * (1.0 - delta) * g0 * ramp);
}

double volume_g(const TreeParams& params, double p, double tau, long long m) {
    check_subcritical(params, p, tau);
    const double pe = p * -std::expm1(-tau);  // p (1 - e^{-tau})
    const double et = std::exp(-tau);
    double g = 0.0;
    for (long long i = 0; i < m; ++i) g = pe + p * et * one_minus_pow(g, params.sigma);
    return g;
}

VolumeQuad volume_quad_params(const TreeParams& params, double p, double tau) {
    check_subcritical(params, p, tau);
    VolumeQuad q{};
    q.alpha = p * params.sigma * std::exp(-tau);
    q.beta = (params.sigma - 1) * q.alpha;
    const double y0 = 1.0 - q.alpha;
    q.D = std::sqrt(y0 * y0 + 2.0 * q.beta * p * -std::expm1(-tau));
    q.C = q.D == y0 ? std::numeric_limits<double>::infinity() : (q.D + y0) / (q.D - y0);
    return q;
}

double volume_g_tilde(const TreeParams& params, double p, double tau, double t) {
    const VolumeQuad q = volume_quad_params(params, p, tau);
    const double y0 = 1.0 - q.alpha;
    const double num = 2.0 * p * -std::expm1(-tau) * -std::expm1(-q.D * t);
    const double den = (q.D + y0) + (q.D - y0) * std::exp(-q.D * t);
    return den == 0.0 ? 0.0 : num / den;
}

namespace {

enum class Recursion { slice, volume };

double conditional_laplace(const WeightChain& chain, long long n, double tau, Recursion kind) {
    if (tau < 0.0) throw std::domain_error("conditional laplace: tau must be nonnegative");
    const long long needed = kind == Recursion::slice ? n : n + 1;
    if (static_cast<long long>(chain.w.size()) < needed)
        throw std::invalid_argument("conditional laplace: chain shorter than n");
    const TreeParams& params = chain.params;
    const double scale = kind == Recursion::slice
                             ? tau / (params.rho * static_cast<double>(n))
                             : tau / (params.rho * static_cast<double>(n) * static_cast<double>(n));
    double log_sum = kind == Recursion::slice ? -scale : -scale * static_cast<double>(n + 1);
    for (long long k = 0; k < needed; ++k) {
        const double p_hat = dual(params, chain.w[static_cast<std::size_t>(k)]);
        const double g = kind == Recursion::slice ? slice_g(params, p_hat, scale, n - k)
                                                  : volume_g(params, p_hat, scale, n - k);
        log_sum += (params.sigma - 1) * std::log1p(-g);
    }
    return std::exp(log_sum);
}

McEstimate limit_laplace_impl(double tau, std::size_t replicas, std::uint64_t seed, bool hat) {
    if (tau < 0.0) throw std::domain_error("limit laplace: tau must be nonnegative");
    if (tau == 0.0) return {1.0, 0.0, replicas, seed};
    const double eps = default_envelope_eps(tau);
    std::vector<double> values(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        const EnvelopePath path =
            sample_envelope(eps, 1.0, derive_stream(seed, hat ? "envelope.hat" : "envelope.s", r));
        const Functional f = hat ? s_hat_functional(tau, path) : s_functional(tau, path);
        values[r] = std::exp(-f.value);
    }
    McEstimate est = mc_estimate(values, seed);
    est.seed = seed;
    return est;
}

}  // namespace

double conditional_slice_laplace(const WeightChain& chain, long long n, double tau) {
    return conditional_laplace(chain, n, tau, Recursion::slice);
}

double conditional_volume_laplace(const WeightChain& chain, long long n, double tau) {
    return conditional_laplace(chain, n, tau, Recursion::volume);
}

McEstimate limit_laplace_gamma(double tau, std::size_t replicas, std::uint64_t seed) {
    return limit_laplace_impl(tau, replicas, seed, false);
}

McEstimate limit_laplace_gamma_hat(double tau, std::size_t replicas, std::uint64_t seed) {
    return limit_laplace_impl(tau, replicas, seed, true);
}

double covariance_limit(double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("covariance_limit: a outside [0,1]");
    return 1.0 + a * (1.0 + a) / 3.0;
}

McEstimate theorem_1_9_statistic(const TreeParams& params, int n, std::size_t replicas,
                                 std::uint64_t seed, unsigned threads) {
    if (n < 1) throw std::domain_error("theorem_1_9_statistic: n must be >= 1");
    std::vector<double> values(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
        const ClusterTree tree = sample_ipc(params, n, derive_stream(seed, "thm19.ipc", r));
        long long c0n = 0;
        for (int h = 0; h <= n; ++h) c0n += tree.counts[static_cast<std::size_t>(h)];
        values[r] = static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(c0n);
    });
    McEstimate est = mc_estimate(values, seed);
    est.seed = seed;
    return est;
}

}  // namespace invtree
