#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace invtree {

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
};

/// Sample mean with SE = sample stdev / sqrt(replicas). Needs >= 2 samples
/// for a finite SE.
McEstimate mc_estimate(std::span<const double> samples, std::uint64_t seed = 0);

enum class GofKind { ks_one_sample, chi_square };

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    GofKind kind = GofKind::ks_one_sample;
    long long dof = 0;
};

/// One-sample Kolmogorov-Smirnov with the asymptotic p-value. Requires at
/// least 20 samples.
GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov distribution tail Q_KS(lambda).
double ks_tail(double lambda);

/// Two-sample homogeneity chi-square on aligned histogram counts (bins with
/// combined expected count < 5 should be merged by the caller; see
/// merge_sparse_bins).
GofResult chi_square_two_sample(std::span<const long long> a, std::span<const long long> b);

/// Merges adjacent bins of the pooled histogram until each merged bin holds
/// at least min_count in each sample's expectation; returns merged copies.
void merge_sparse_bins(std::vector<long long>& a, std::vector<long long>& b, double min_count = 5.0);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double slope_se = 0.0;  // from per-point y errors when provided, else from residuals
};

LinFit ols(std::span<const double> x, std::span<const double> y);

/// OLS with known per-point standard errors on y; slope_se is propagated
/// from them.
LinFit ols_with_errors(std::span<const double> x, std::span<const double> y,
                       std::span<const double> y_se);

}  // namespace invtree
