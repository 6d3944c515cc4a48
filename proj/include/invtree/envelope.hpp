#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace invtree {

/// Piecewise-constant nonincreasing record path of the unit Poisson process,
/// tracked on the window [eps, t_end]. times[0] == eps carries the initial
/// level; later entries are the jump times. Right-continuous.
struct EnvelopePath {
    double eps = 0.0;
    double t_end = 1.0;
    std::vector<double> times;
    std::vector<double> levels;
    bool zero_level = false;  // reserved L == 0 path (the critical-dressing limit)

    static EnvelopePath zero(double t_end = 1.0);
    static EnvelopePath from_pieces(double eps, double t_end, std::vector<double> times,
                                    std::vector<double> levels);

    /// Level at time t (cadlag), t in [eps, t_end].
    double level_at(double t) const;
};

/// Markov-jump sampler of the lower envelope: L(eps) ~ Exponential(rate eps),
/// then from level z wait Exponential(rate z) and drop to z*U, truncated at
/// t_end.
EnvelopePath sample_envelope(double eps, double t_end, std::uint64_t seed);

/// Closed-form multivariate Laplace transform
///   E exp(-sum tau_i L(t_i)) = prod_i (1 - tau_i/(t_i + s_i)), s_i = tau_1+..+tau_i,
/// for strictly increasing times and nonnegative weights.
double envelope_laplace(std::span<const double> ts, std::span<const double> taus);

/// Functional value plus the bound on the mass ignored below the window's
/// left endpoint (2 tau eps for S, 4 tau eps for S-hat); the bound is
/// reported, never added.
struct Functional {
    double value;
    double truncation_bound;
};

/// S(tau, L) = 2 tau int_0^1 L e^{-(1-t)L} / (L + tau(1 - e^{-(1-t)L})) dt,
/// evaluated exactly per constant piece via the antiderivative
/// -2 log(L + tau(1 - e^{-(1-t)L})).
Functional s_functional(double tau, const EnvelopePath& path);

/// S-hat(tau, L) = 4 tau int_0^1 dt / (L + kappa coth((1/2)(1-t) kappa)),
/// kappa = sqrt(4 tau + L^2); adaptive quadrature per piece to relative
/// tolerance 1e-8.
Functional s_hat_functional(double tau, const EnvelopePath& path);

/// Default left endpoint so the ignored [0, eps] mass stays below 1e-4 for
/// both functionals.
double default_envelope_eps(double tau);

}  // namespace invtree
