#include "invtree/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "invtree/rng.hpp"

namespace invtree {

EnvelopePath EnvelopePath::zero(double t_end) {
    EnvelopePath p;
    p.eps = 0.0;
    p.t_end = t_end;
    p.times = {0.0};
    p.levels = {0.0};
    p.zero_level = true;
    return p;
}

EnvelopePath EnvelopePath::from_pieces(double eps, double t_end, std::vector<double> times,
                                       std::vector<double> levels) {
    if (times.empty() || times.size() != levels.size())
        throw std::invalid_argument("EnvelopePath: times/levels mismatch");
    if (!(eps >= 0.0 && eps < t_end) || times.front() != eps)
        throw std::invalid_argument("EnvelopePath: bad window");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (levels[i] <= 0.0) throw std::invalid_argument("EnvelopePath: levels must be positive");
        if (i > 0 && !(times[i] > times[i - 1] && levels[i] < levels[i - 1]))
            throw std::invalid_argument("EnvelopePath: jumps must decrease at increasing times");
    }
    EnvelopePath p;
    p.eps = eps;
    p.t_end = t_end;
    p.times = std::move(times);
    p.levels = std::move(levels);
    return p;
}

double EnvelopePath::level_at(double t) const {
    if (zero_level) return 0.0;
    if (!(t >= eps && t <= t_end)) throw std::domain_error("EnvelopePath::level_at: t outside window");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    return levels[static_cast<std::size_t>(it - times.begin()) - 1];
}

EnvelopePath sample_envelope(double eps, double t_end, std::uint64_t seed) {
    if (!(eps > 0.0 && eps < t_end)) throw std::invalid_argument("sample_envelope: need 0 < eps < t_end");
    Rng rng(seed);
    EnvelopePath p;
    p.eps = eps;
    p.t_end = t_end;
    double z = rng.exponential(eps);
    double t = eps;
    p.times.push_back(t);
    p.levels.push_back(z);
    for (;;) {
        t += rng.exponential(z);
        if (t > t_end) break;
        z *= rng.uniform_pos();
        p.times.push_back(t);
        p.levels.push_back(z);
    }
    return p;
}

double envelope_laplace(std::span<const double> ts, std::span<const double> taus) {
    if (ts.size() != taus.size() || ts.empty())
        throw std::domain_error("envelope_laplace: need matching nonempty times/weights");
    double prev_t = 0.0, s = 0.0, prod = 1.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > prev_t)) throw std::domain_error("envelope_laplace: times must be strictly increasing");
        if (taus[i] < 0.0) throw std::domain_error("envelope_laplace: weights must be nonnegative");
        const double s_prev = s;
        s += taus[i];
        prod *= (ts[i] + s_prev) / (ts[i] + s);
        prev_t = ts[i];
    }
    return prod;
}

namespace {

// Antiderivative bracket of the S integrand over [a, b] at constant level L:
// the integrand is -2 d/dt log(L + tau (1 - e^{-(1-t) L})).
double s_piece(double tau, double level, double a, double b) {
    if (level == 0.0) return 2.0 * (std::log1p(tau * (1.0 - a)) - std::log1p(tau * (1.0 - b)));
    const double ga = level + tau * -std::expm1(-(1.0 - a) * level);
    const double gb = level + tau * -std::expm1(-(1.0 - b) * level);
    return 2.0 * (std::log(ga) - std::log(gb));
}

double s_hat_integrand(double tau, double level, double t) {
    const double kappa = std::sqrt(4.0 * tau + level * level);
    const double arg = 0.5 * (1.0 - t) * kappa;
    if (arg <= 0.0) return 0.0;
    const double th = std::tanh(arg);
    if (th == 0.0) return 0.0;
    return 4.0 * tau / (level + kappa / th);
}

double adaptive_simpson(double tau, double level, double a, double fa, double m, double fm,
                        double b, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = s_hat_integrand(tau, level, lm);
    const double frm = s_hat_integrand(tau, level, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || depth >= 40)
        return left + right + err / 15.0;
    return adaptive_simpson(tau, level, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(tau, level, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
}

double s_hat_piece(double tau, double level, double a, double b) {
    if (level == 0.0) {
        const double r = std::sqrt(tau);
        return 2.0 * (std::log(std::cosh((1.0 - a) * r)) - std::log(std::cosh((1.0 - b) * r)));
    }
    const double fa = s_hat_integrand(tau, level, a);
    const double fb = s_hat_integrand(tau, level, b);
    const double m = 0.5 * (a + b);
    const double fm = s_hat_integrand(tau, level, m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(1e-8 * std::abs(whole), 1e-14);
    return adaptive_simpson(tau, level, a, fa, m, fm, b, fb, whole, tol, 0);
}

template <typename Piece>
Functional integrate_pieces(double tau, const EnvelopePath& path, Piece piece, double bound_factor) {
    if (tau < 0.0) throw std::domain_error("functional: tau must be nonnegative");
    if (path.t_end < 1.0) throw std::domain_error("functional: path window must cover [eps, 1]");
    Functional out{0.0, bound_factor * tau * path.eps};
    if (tau == 0.0) return out;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const double a = std::max(path.times[i], path.eps);
        const double b = i + 1 < path.times.size() ? std::min(path.times[i + 1], 1.0) : 1.0;
        if (b <= a) continue;
        out.value += piece(tau, path.zero_level ? 0.0 : path.levels[i], a, b);
        if (b >= 1.0) break;
    }
    return out;
}

}  // namespace

Functional s_functional(double tau, const EnvelopePath& path) {
    return integrate_pieces(tau, path, s_piece, 2.0);
}

Functional s_hat_functional(double tau, const EnvelopePath& path) {
    return integrate_pieces(tau, path, s_hat_piece, 4.0);
}

double default_envelope_eps(double tau) {
    constexpr double tol = 1e-4;
    if (tau <= 0.0) return 1e-4;
    return std::min(1e-4, tol / (4.0 * tau));
}

}  // namespace invtree
