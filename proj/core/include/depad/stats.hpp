#pragma once

#include <span>
#include <vector>

#include "depad/dataset.hpp"

namespace depad {

struct CITestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;  // p_value > alpha
    double alpha = 0.01;
    bool degenerate = false;  // a zero-variance input forced the result
};

enum class Alternative { Greater, Less, TwoSided };

struct RankSumResult {
    double statistic = 0.0;  // Mann-Whitney U of the first sample
    double p_value = 1.0;
    Alternative alternative = Alternative::TwoSided;
    bool exact = false;  // exhaustive enumeration was used (small samples)
};

struct PartialCorrelation {
    double rho = 0.0;
    bool degenerate = false;
};

namespace detail {
double normal_cdf(double x);
double normal_sf(double x);
} // namespace detail

// Pearson correlation of residuals after regressing both variables on the
// conditioning set (intercept included). Zero-variance inputs or residuals
// yield rho = 0 with the degenerate flag set.
PartialCorrelation partial_correlation_ex(const Dataset& d, int i, int j,
                                          std::span<const int> cond);
double partial_correlation(const Dataset& d, int i, int j, std::span<const int> cond);

// Precomputed correlation matrix; partial correlations come out of the
// conditional covariance (Schur complement), which agrees with the residual
// route to numerical precision but costs O(|cond|^3) per query instead of
// O(n |cond|^2). Shared read-only across threads.
class CorrelationCache {
public:
    explicit CorrelationCache(const Dataset& d);
    std::size_t n_rows() const { return n_; }
    double corr(int i, int j) const { return matrix_[index(i, j)]; }
    PartialCorrelation partial(int i, int j, std::span<const int> cond) const;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * m_ + static_cast<std::size_t>(j);
    }
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<double> matrix_;
    std::vector<bool> constant_;
};

// Fisher's z conditional-independence test:
//   z = 0.5 * ln((1+rho)/(1-rho)) * sqrt(n - |cond| - 3)
// with a two-sided p from the standard normal. |rho| = 1 maps to p = 0 with
// a large finite statistic. Degenerate variables test as independent.
CITestResult fisher_z_from_rho(const PartialCorrelation& pc, std::size_t n,
                               std::size_t cond_size, double alpha);
CITestResult fisher_z_test(const Dataset& d, int i, int j,
                           std::span<const int> cond, double alpha);
CITestResult fisher_z_test(const CorrelationCache& cache, int i, int j,
                           std::span<const int> cond, double alpha);

// Plug-in mutual information in nats over equal-frequency binnings.
// bins >= 2; constant columns give 0.
double mutual_information(const Dataset& d, int i, int j, int bins);
double mutual_information(std::span<const double> x, std::span<const double> y, int bins);

// Szekely's distance correlation via doubly-centered distance matrices.
// O(n^2) time and memory; constant columns give 0.
double distance_correlation(const Dataset& d, int i, int j);
double distance_correlation(std::span<const double> x, std::span<const double> y);

// Wilcoxon rank-sum / Mann-Whitney with average ranks. Exhaustive
// enumeration when |a| + |b| <= 12, otherwise normal approximation with tie
// correction and continuity correction.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b,
                            Alternative alternative);

} // namespace depad
