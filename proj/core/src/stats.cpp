#include "depad/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace depad {

namespace detail {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }
double normal_sf(double x) { return 0.5 * std::erfc(x / 1.4142135623730951); }

namespace {

constexpr double kDegenerateEps = 1e-12;
constexpr double kZSentinel = 1e12;

// Solves A x = b for a small symmetric positive semi-definite system via
// Cholesky; returns false when the matrix is numerically singular.
bool cholesky_solve(std::vector<double>& a, std::size_t p, std::vector<double>& b) {
    for (std::size_t k = 0; k < p; ++k) {
        double diag = a[k * p + k];
        for (std::size_t r = 0; r < k; ++r) diag -= a[k * p + r] * a[k * p + r];
        if (diag <= kDegenerateEps) return false;
        const double root = std::sqrt(diag);
        a[k * p + k] = root;
        for (std::size_t i = k + 1; i < p; ++i) {
            double v = a[i * p + k];
            for (std::size_t r = 0; r < k; ++r) v -= a[i * p + r] * a[k * p + r];
            a[i * p + k] = v / root;
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < p; ++i) {
        double v = b[i];
        for (std::size_t r = 0; r < i; ++r) v -= a[i * p + r] * b[r];
        b[i] = v / a[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t r = ii + 1; r < p; ++r) v -= a[r * p + ii] * b[r];
        b[ii] = v / a[ii * p + ii];
    }
    return true;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= kDegenerateEps || syy <= kDegenerateEps) return std::nan("");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Residuals of y after least-squares on the conditioning columns plus an
// intercept. Returns false when the regression is degenerate.
bool residualize(const Dataset& d, int target, std::span<const int> cond,
                 std::vector<double>& out) {
    const std::size_t n = d.n_rows();
    const std::size_t p = cond.size() + 1;  // + intercept
    std::vector<double> gram(p * p, 0.0), rhs(p, 0.0);
    auto col = [&](std::size_t c) -> const std::vector<double>& {
        return d.column(static_cast<std::size_t>(cond[c - 1]));
    };
    const auto& y = d.column(static_cast<std::size_t>(target));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            double s = 0.0;
            if (a == 0 && b == 0) s = static_cast<double>(n);
            else if (b == 0) { for (double v : col(a)) s += v; }
            else { const auto& ca = col(a); const auto& cb = col(b);
                   for (std::size_t i = 0; i < n; ++i) s += ca[i] * cb[i]; }
            gram[a * p + b] = gram[b * p + a] = s;
        }
        double s = 0.0;
        if (a == 0) { for (double v : y) s += v; }
        else { const auto& ca = col(a); for (std::size_t i = 0; i < n; ++i) s += ca[i] * y[i]; }
        rhs[a] = s;
    }
    // tiny ridge jitter keeps collinear conditioning sets solvable
    std::vector<double> g = gram, beta = rhs;
    if (!cholesky_solve(g, p, beta)) {
        g = gram;
        for (std::size_t a = 0; a < p; ++a) g[a * p + a] += 1e-10 * (1.0 + gram[a * p + a]);
        beta = rhs;
        if (!cholesky_solve(g, p, beta)) return false;
    }
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = beta[0];
        for (std::size_t c = 1; c < p; ++c) fit += beta[c] * col(c)[i];
        out[i] = y[i] - fit;
    }
    return true;
}

} // namespace
} // namespace detail

PartialCorrelation partial_correlation_ex(const Dataset& d, int i, int j,
                                          std::span<const int> cond) {
    if (i == j) throw std::invalid_argument("partial_correlation: i == j");
    for (int c : cond)
        if (c == i || c == j) throw std::invalid_argument("partial_correlation: target inside conditioning set");
    if (d.n_rows() <= cond.size() + 3)
        throw std::invalid_argument("partial_correlation: too few rows for conditioning set");

    if (d.is_constant(static_cast<std::size_t>(i)) || d.is_constant(static_cast<std::size_t>(j)))
        return {0.0, true};

    std::vector<double> ri, rj;
    if (!detail::residualize(d, i, cond, ri) || !detail::residualize(d, j, cond, rj))
        return {0.0, true};
    const double rho = detail::pearson(ri, rj);
    if (std::isnan(rho)) return {0.0, true};
    return {rho, false};
}

double partial_correlation(const Dataset& d, int i, int j, std::span<const int> cond) {
    return partial_correlation_ex(d, i, j, cond).rho;
}

CorrelationCache::CorrelationCache(const Dataset& d) : n_(d.n_rows()), m_(d.n_vars()) {
    std::vector<double> means(m_), norms(m_);
    std::vector<std::vector<double>> centered(m_);
    constant_.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) {
        const auto& col = d.column(j);
        double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n_);
        centered[j].resize(n_);
        double ss = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            centered[j][i] = col[i] - mean;
            ss += centered[j][i] * centered[j][i];
        }
        means[j] = mean;
        norms[j] = std::sqrt(ss);
        constant_[j] = ss <= 1e-12;
    }
    matrix_.assign(m_ * m_, 0.0);
    for (std::size_t a = 0; a < m_; ++a) {
        matrix_[a * m_ + a] = 1.0;
        for (std::size_t b = 0; b < a; ++b) {
            double r = 0.0;
            if (!constant_[a] && !constant_[b]) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n_; ++i) dot += centered[a][i] * centered[b][i];
                r = std::clamp(dot / (norms[a] * norms[b]), -1.0, 1.0);
            }
            matrix_[a * m_ + b] = matrix_[b * m_ + a] = r;
        }
    }
}

PartialCorrelation CorrelationCache::partial(int i, int j, std::span<const int> cond) const {
    if (i == j) throw std::invalid_argument("partial: i == j");
    if (n_ <= cond.size() + 3)
        throw std::invalid_argument("partial: too few rows for conditioning set");
    if (constant_[static_cast<std::size_t>(i)] || constant_[static_cast<std::size_t>(j)])
        return {0.0, true};
    const std::size_t c = cond.size();
    if (c == 0) return {corr(i, j), false};

    // conditional covariance of (i, j) given cond:
    //   C = S_tt - S_tc * S_cc^{-1} * S_ct
    std::vector<double> scc(c * c), sci(c), scj(c);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b < c; ++b) scc[a * c + b] = corr(cond[a], cond[b]);
        sci[a] = corr(cond[a], i);
        scj[a] = corr(cond[a], j);
    }
    std::vector<double> wi = sci, wj = scj;
    std::vector<double> g = scc;
    if (!detail::cholesky_solve(g, c, wi)) {
        g = scc;
        for (std::size_t a = 0; a < c; ++a) g[a * c + a] += 1e-10;
        wi = sci;
        if (!detail::cholesky_solve(g, c, wi)) return {0.0, true};
        wj = scj;
        detail::cholesky_solve(g, c, wj);
    } else {
        g = scc;
        detail::cholesky_solve(g, c, wj);
    }
    double cii = 1.0, cjj = 1.0, cij = corr(i, j);
    for (std::size_t a = 0; a < c; ++a) {
        cii -= sci[a] * wi[a];
        cjj -= scj[a] * wj[a];
        cij -= sci[a] * wj[a];
    }
    if (cii <= 1e-12 || cjj <= 1e-12) return {0.0, true};
    return {std::clamp(cij / std::sqrt(cii * cjj), -1.0, 1.0), false};
}

CITestResult fisher_z_from_rho(const PartialCorrelation& pc, std::size_t n,
                               std::size_t cond_size, double alpha) {
    if (n <= cond_size + 3) throw std::invalid_argument("fisher_z: n - |cond| - 3 must be positive");
    CITestResult r;
    r.alpha = alpha;
    r.degenerate = pc.degenerate;
    if (pc.degenerate) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.independent = true;
        return r;
    }
    const double rho = pc.rho;
    const double scale = std::sqrt(static_cast<double>(n - cond_size - 3));
    if (std::fabs(rho) >= 1.0) {
        r.statistic = (rho > 0 ? 1.0 : -1.0) * detail::kZSentinel;
        r.p_value = 0.0;
    } else {
        r.statistic = 0.5 * std::log((1.0 + rho) / (1.0 - rho)) * scale;
        r.p_value = std::min(1.0, 2.0 * detail::normal_sf(std::fabs(r.statistic)));
    }
    r.independent = r.p_value > alpha;
    return r;
}

CITestResult fisher_z_test(const Dataset& d, int i, int j,
                           std::span<const int> cond, double alpha) {
    return fisher_z_from_rho(partial_correlation_ex(d, i, j, cond), d.n_rows(), cond.size(), alpha);
}

CITestResult fisher_z_test(const CorrelationCache& cache, int i, int j,
                           std::span<const int> cond, double alpha) {
    return fisher_z_from_rho(cache.partial(i, j, cond), cache.n_rows(), cond.size(), alpha);
}

namespace {

// Equal-frequency bin assignment; tied values always share a bin.
std::vector<int> equal_frequency_bins(std::span<const double> x, int bins) {
    const std::size_t n = x.size();
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;  // last value of each bin except the final one
    edges.reserve(static_cast<std::size_t>(bins) - 1);
    for (int b = 1; b < bins; ++b) {
        const std::size_t cut = (static_cast<std::size_t>(b) * n) / static_cast<std::size_t>(bins);
        if (cut == 0 || cut >= n) continue;
        edges.push_back(sorted[cut - 1]);
    }
    std::vector<int> assign(n);
    for (std::size_t i = 0; i < n; ++i) {
        int b = 0;
        for (double e : edges)
            if (x[i] > e) ++b;
        assign[i] = b;
    }
    return assign;
}

} // namespace

double mutual_information(std::span<const double> x, std::span<const double> y, int bins) {
    if (bins < 2) throw std::invalid_argument("mutual_information: bins must be >= 2");
    if (x.size() != y.size()) throw std::invalid_argument("mutual_information: length mismatch");
    const std::size_t n = x.size();
    const bool cx = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool cy = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (cx || cy) return 0.0;

    const auto bx = equal_frequency_bins(x, bins);
    const auto by = equal_frequency_bins(y, bins);
    const std::size_t b = static_cast<std::size_t>(bins);
    std::vector<double> joint(b * b, 0.0), px(b, 0.0), py(b, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(bx[i]) * b + static_cast<std::size_t>(by[i])] += 1.0;
        px[static_cast<std::size_t>(bx[i])] += 1.0;
        py[static_cast<std::size_t>(by[i])] += 1.0;
    }
    const double dn = static_cast<double>(n);
    double mi = 0.0;
    for (std::size_t a = 0; a < b; ++a) {
        for (std::size_t c = 0; c < b; ++c) {
            const double pab = joint[a * b + c];
            if (pab <= 0.0) continue;
            mi += (pab / dn) * std::log(pab * dn / (px[a] * py[c]));
        }
    }
    return std::max(0.0, mi);
}

double mutual_information(const Dataset& d, int i, int j, int bins) {
    return mutual_information(d.column(static_cast<std::size_t>(i)),
                              d.column(static_cast<std::size_t>(j)), bins);
}

double distance_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("distance_correlation: length mismatch");
    const std::size_t n = x.size();
    if (n < 4) throw std::invalid_argument("distance_correlation: need n >= 4");

    auto centered = [&](std::span<const double> v) {
        std::vector<double> a(n * n);
        std::vector<double> row_mean(n, 0.0);
        double grand = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = 0; q < n; ++q) {
                const double dpq = std::fabs(v[p] - v[q]);
                a[p * n + q] = dpq;
                row_mean[p] += dpq;
            }
            grand += row_mean[p];
            row_mean[p] /= static_cast<double>(n);
        }
        grand /= static_cast<double>(n) * static_cast<double>(n);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                a[p * n + q] += grand - row_mean[p] - row_mean[q];
        return a;
    };

    const auto a = centered(x);
    const auto b = centered(y);
    double dcov = 0.0, dvx = 0.0, dvy = 0.0;
    for (std::size_t t = 0; t < n * n; ++t) {
        dcov += a[t] * b[t];
        dvx += a[t] * a[t];
        dvy += b[t] * b[t];
    }
    if (dvx <= 1e-24 || dvy <= 1e-24) return 0.0;
    const double denom = std::sqrt(std::sqrt(dvx) * std::sqrt(dvy));
    const double num = std::sqrt(std::max(0.0, dcov));
    return std::clamp(num / denom, 0.0, 1.0);
}

double distance_correlation(const Dataset& d, int i, int j) {
    return distance_correlation(d.column(static_cast<std::size_t>(i)),
                                d.column(static_cast<std::size_t>(j)));
}

namespace {

// Average ranks (1-based) of the pooled sample.
std::vector<double> average_ranks(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

double u_statistic(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = average_ranks(pooled);
    double ra = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ra += ranks[i];
    const double na = static_cast<double>(a.size());
    return ra - na * (na + 1.0) / 2.0;
}

// p-values by exhaustive enumeration of all group assignments.
RankSumResult rank_sum_exact(std::span<const double> a, std::span<const double> b,
                             Alternative alt) {
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = average_ranks(pooled);
    double u_obs = 0.0;
    for (std::size_t i = 0; i < na; ++i) u_obs += ranks[i];
    u_obs -= static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;

    std::size_t total = 0, le = 0, ge = 0;
    std::vector<std::size_t> pick(na);
    std::iota(pick.begin(), pick.end(), 0);
    const double eps = 1e-9;
    while (true) {
        double u = 0.0;
        for (std::size_t idx : pick) u += ranks[idx];
        u -= static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
        ++total;
        if (u <= u_obs + eps) ++le;
        if (u >= u_obs - eps) ++ge;
        // next combination
        std::size_t k = na;
        while (k > 0 && pick[k - 1] == n - na + k - 1) --k;
        if (k == 0) break;
        ++pick[k - 1];
        for (std::size_t t = k; t < na; ++t) pick[t] = pick[t - 1] + 1;
    }
    RankSumResult r;
    r.statistic = u_obs;
    r.alternative = alt;
    r.exact = true;
    const double pl = static_cast<double>(le) / static_cast<double>(total);
    const double pg = static_cast<double>(ge) / static_cast<double>(total);
    if (alt == Alternative::Less) r.p_value = pl;
    else if (alt == Alternative::Greater) r.p_value = pg;
    else r.p_value = std::min(1.0, 2.0 * std::min(pl, pg));
    return r;
}

} // namespace

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b,
                            Alternative alternative) {
    if (a.empty() || b.empty()) throw std::invalid_argument("rank_sum_test: empty sample");
    if (a.size() + b.size() <= 12) return rank_sum_exact(a, b, alternative);

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    const double u = u_statistic(a, b);
    const double mean = na * nb / 2.0;

    // tie correction over pooled values
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    double tie_sum = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    const double var = na * nb / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));

    RankSumResult r;
    r.statistic = u;
    r.alternative = alternative;
    if (var <= 0.0) {  // everything tied
        r.p_value = 1.0;
        return r;
    }
    const double sd = std::sqrt(var);
    auto z_with_cc = [&](double direction) {
        // continuity correction of 0.5 toward the mean
        return (u - mean + 0.5 * direction) / sd;
    };
    if (alternative == Alternative::Less) {
        r.p_value = detail::normal_cdf(z_with_cc(+1.0));
    } else if (alternative == Alternative::Greater) {
        r.p_value = detail::normal_sf(z_with_cc(-1.0));
    } else {
        const double z = (u - mean) / sd;
        const double zc = (std::fabs(u - mean) - 0.5) / sd;
        r.p_value = std::min(1.0, 2.0 * detail::normal_sf(std::max(0.0, z == 0.0 ? 0.0 : zc)));
    }
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

} // namespace depad
