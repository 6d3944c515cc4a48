#include "invtree/weight_chain.hpp"

#include <algorithm>
#include <cmath>

#include "invtree/rng.hpp"

namespace invtree {

namespace {

// R(W) is queried every step but W changes rarely; cache the last value.
class JumpRateCache {
  public:
    explicit JumpRateCache(const TreeParams& params) : params_(params) {}
    double operator()(double w) {
        if (w != key_) {
            key_ = w;
            value_ = jump_rate(params_, w);
        }
        return value_;
    }

  private:
    TreeParams params_;
    double key_ = -1.0;
    double value_ = 0.0;
};

}  // namespace

WeightChain sample_chain(const TreeParams& params, std::size_t n, std::uint64_t seed,
                         std::optional<double> w0) {
    Rng rng(seed);
    WeightChain chain{params, {}, seed};
    chain.w.reserve(n + 1);
    chain.w.push_back(w0 ? *w0 : theta_inverse(params, rng.uniform_pos()));
    JumpRateCache rate(params);
    for (std::size_t k = 0; k < n; ++k) {
        const double u_jump = rng.uniform();
        const double u_x = rng.uniform_pos();
        double w = chain.w.back();
        if (u_jump < rate(w)) w = std::min(w, theta_inverse(params, u_x));
        chain.w.push_back(w);
    }
    return chain;
}

DualChain dualize(const WeightChain& chain) {
    DualChain out{chain.params, {}};
    out.w_hat.reserve(chain.w.size());
    for (double w : chain.w) out.w_hat.push_back(dual(chain.params, w));
    return out;
}

RescaledChain rescale(const WeightChain& chain) {
    RescaledChain out;
    const std::size_t n = chain.w.size();
    out.y.reserve(n);
    out.z.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k < n; ++k) {
        out.y.push_back(chain.params.rho * theta(chain.params, chain.w[k]));
        if (k >= 1) out.z.push_back(static_cast<double>(k) * (chain.params.sigma * chain.w[k] - 1.0));
    }
    return out;
}

double q_of_y(const TreeParams& params, double y) {
    if (!(y > 0.0 && y <= params.rho)) throw std::domain_error("q_of_y: y outside (0, rho]");
    const double u = theta_inverse(params, y / params.rho);
    const double rate = u >= 1.0 - 1e-15 ? 1.0 : jump_rate(params, u);
    return (y / params.rho) * rate;
}

std::vector<double> sample_y_chain(const TreeParams& params, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> y;
    y.reserve(n + 1);
    y.push_back(params.rho * rng.uniform_pos());
    JumpRateCache rate(params);
    for (std::size_t k = 0; k < n; ++k) {
        const double u_jump = rng.uniform();
        const double u_x = rng.uniform_pos();
        double cur = y.back();
        const double u_theta = cur / params.rho;
        const double w = theta_inverse(params, u_theta);
        const double r = w >= 1.0 - 1e-15 ? 1.0 : rate(w);
        if (u_jump < r) cur = std::min(cur, params.rho * u_x);
        y.push_back(cur);
    }
    return y;
}

CoupledChains couple_chains(const TreeParams& params, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    CoupledChains out{{}, {}, -1};
    out.w.reserve(n + 1);
    out.w_prime.reserve(n + 1);
    out.w.push_back(theta_inverse(params, rng.uniform_pos()));
    out.w_prime.push_back(theta_inverse(params, rng.uniform_pos()));
    if (out.w[0] == out.w_prime[0]) out.coalesce_step = 0;
    JumpRateCache rate_a(params), rate_b(params);
    for (std::size_t k = 0; k < n; ++k) {
        const double u_jump = rng.uniform();
        const double x = theta_inverse(params, rng.uniform_pos());
        double a = out.w.back();
        double b = out.w_prime.back();
        if (u_jump < rate_a(a)) a = std::min(a, x);
        if (u_jump < rate_b(b)) b = std::min(b, x);
        out.w.push_back(a);
        out.w_prime.push_back(b);
        if (out.coalesce_step < 0 && a == b) out.coalesce_step = static_cast<long long>(k) + 1;
    }
    return out;
}

}  // namespace invtree
