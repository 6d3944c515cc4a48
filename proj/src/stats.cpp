#include "invtree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace invtree {

McEstimate mc_estimate(std::span<const double> samples, std::uint64_t seed) {
    if (samples.size() < 2) throw std::invalid_argument("mc_estimate: need >= 2 samples");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples.size())), samples.size(), seed};
}

double ks_tail(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j & 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12 * std::abs(sum) + 1e-300) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 20) throw std::invalid_argument("ks_test: need >= 20 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max((i + 1) / n - f, f - i / n));
    }
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    return {d, ks_tail(lambda), GofKind::ks_one_sample, 0};
}

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

void merge_sparse_bins(std::vector<long long>& a, std::vector<long long>& b, double min_count) {
    if (a.size() != b.size()) throw std::invalid_argument("merge_sparse_bins: size mismatch");
    const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), 0LL));
    const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), 0LL));
    const double total = na + nb;
    std::vector<long long> ma, mb;
    long long ca = 0, cb = 0;
    auto expected_ok = [&](long long xa, long long xb) {
        const double pooled = static_cast<double>(xa + xb) / total;
        return pooled * na >= min_count && pooled * nb >= min_count;
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca += a[i];
        cb += b[i];
        if (expected_ok(ca, cb)) {
            ma.push_back(ca);
            mb.push_back(cb);
            ca = cb = 0;
        }
    }
    if (ca + cb > 0) {
        if (!ma.empty() && !expected_ok(ca, cb)) {
            ma.back() += ca;
            mb.back() += cb;
        } else {
            ma.push_back(ca);
            mb.push_back(cb);
        }
    }
    a = std::move(ma);
    b = std::move(mb);
}

GofResult chi_square_two_sample(std::span<const long long> a, std::span<const long long> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("chi_square_two_sample: need >= 2 aligned bins");
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    const double total = na + nb;
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double pooled = static_cast<double>(a[i] + b[i]) / total;
        const double ea = pooled * na;
        const double eb = pooled * nb;
        if (ea <= 0.0 || eb <= 0.0) continue;
        stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    }
    const long long dof = static_cast<long long>(a.size()) - 1;
    return {stat, gamma_q(0.5 * dof, 0.5 * stat), GofKind::chi_square, dof};
}

namespace {

LinFit ols_impl(std::span<const double> x, std::span<const double> y,
                std::span<const double> y_se) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("ols: need >= 3 points");
    const double n = static_cast<double>(x.size());
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols: degenerate x values");
    LinFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    if (!y_se.empty()) {
        double var = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double c = (x[i] - xbar) / sxx;
            var += c * c * y_se[i] * y_se[i];
        }
        fit.slope_se = std::sqrt(var);
    } else if (x.size() > 2) {
        fit.slope_se = std::sqrt(ss / (n - 2.0) / sxx);
    }
    return fit;
}

}  // namespace

LinFit ols(std::span<const double> x, std::span<const double> y) { return ols_impl(x, y, {}); }

LinFit ols_with_errors(std::span<const double> x, std::span<const double> y,
                       std::span<const double> y_se) {
    if (y_se.size() != x.size()) throw std::invalid_argument("ols_with_errors: size mismatch");
    return ols_impl(x, y, y_se);
}

}  // namespace invtree
