#include "depad/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "depad/engine.hpp"
#include "depad/evaluation.hpp"
#include "depad/io.hpp"
#include "depad/rng.hpp"
#include "depad/stats.hpp"
#include "depad/zoo_data.hpp"

namespace depad::selftest {

namespace {

namespace fs = std::filesystem;

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

Dataset dataset_from_columns(std::vector<std::vector<double>> cols,
                             std::optional<std::vector<Label>> labels = std::nullopt) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < cols.size(); ++j) names.push_back("x" + std::to_string(j));
    return Dataset(std::move(cols), std::move(names), std::move(labels));
}

// ---------------------------------------------------------------------------
// 1. normalization contract

Check normalization_contract(const Options& opts) {
    Check c;
    const double tol = opts.inject_failure ? 1e-30 : 1e-9;
    const std::size_t n = 500, m = 20;
    for (std::uint64_t seed = 0; seed < 50 && c.pass; ++seed) {
        Rng rng(substream(0xA11CE, seed));
        std::vector<double> raw(n * m);
        for (double& v : raw) v = std::fabs(rng.normal()) * (1.0 + rng.uniform() * 9.0);
        // one degenerate column per matrix
        for (std::size_t i = 0; i < n; ++i) raw[i * m + (seed % m)] = 4.2;
        const DeviationMatrix dev = normalize_raw_deviations(n, m, std::move(raw));
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = dev.norm_at(i, j);
            const ColumnStats st = compute_stats(col);
            if (dev.degenerate[j]) {
                c.require(j == (seed % m), "unexpected degenerate column");
                c.require(st.median == 0.0 && st.aad == 0.0, "degenerate column not all zeros");
                continue;
            }
            c.require(std::fabs(st.median) <= tol,
                      "column median " + format_double(st.median) + " (seed " + std::to_string(seed) + ")");
            c.require(std::fabs(st.aad - 1.0) <= tol,
                      "column AAD " + format_double(st.aad) + " (seed " + std::to_string(seed) + ")");
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 2. combination correctness

Check combination_correctness(const Options& opts) {
    Check c;
    const std::size_t n = 1000, m = 20;
    Rng rng(0xC0B1);
    std::vector<double> raw(n * m);
    for (double& v : raw) v = std::fabs(rng.normal()) * 3.0;
    const DeviationMatrix dev = normalize_raw_deviations(n, m, std::move(raw));

    const double eta = opts.inject_failure ? 0.1 : 0.0;
    const ScoreVector ps = combine(dev, Combiner::PS, 0.0);
    const ScoreVector rzps = combine(dev, Combiner::RZPS, 0.0);
    const ScoreVector sum = combine(dev, Combiner::Sum, 0.0);
    const ScoreVector mx = combine(dev, Combiner::Max, 0.0);
    const ScoreVector gs = combine(dev, Combiner::GS, 0.0);

    // direct formula evaluation
    std::vector<double> sum_ref(n);
    for (std::size_t i = 0; i < n && c.pass; ++i) {
        double e_ps = 0.0, e_sum = 0.0, e_max = dev.norm_at(i, 0);
        for (std::size_t j = 0; j < m; ++j) {
            const double v = dev.norm_at(i, j);
            if (v > eta) e_ps += v;
            e_sum += v;
            e_max = std::max(e_max, v);
        }
        sum_ref[i] = e_sum;
        c.require(ps.scores[i] == e_ps, "PS mismatch at row " + std::to_string(i));
        c.require(rzps.scores[i] == e_ps, "RZPS mismatch at row " + std::to_string(i));
        c.require(sum.scores[i] == e_sum, "Sum mismatch at row " + std::to_string(i));
        c.require(mx.scores[i] == e_max, "Max mismatch at row " + std::to_string(i));

        // PS at eta 0 = sum over strictly positive normalized deviations
        double pos = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = dev.norm_at(i, j);
            if (v > 0.0) pos += v;
        }
        c.require(ps.scores[i] == pos, "PS(eta=0) != positive-part Sum at row " + std::to_string(i));
    }

    const double mean = std::accumulate(sum_ref.begin(), sum_ref.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double s : sum_ref) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < n && c.pass; ++i) {
        const double expected = std::max(0.0, std::erf((sum_ref[i] - mean) / (sd * 1.4142135623730951)));
        c.require(gs.scores[i] == expected, "GS mismatch at row " + std::to_string(i));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 3. metric oracles

double auc_pairwise_oracle(std::span<const double> scores, std::span<const Label> labels) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t a = 0; a < scores.size(); ++a) {
        if (labels[a] != Label::Anomaly) continue;
        for (std::size_t b = 0; b < scores.size(); ++b) {
            if (labels[b] != Label::Normal) continue;
            pairs += 1.0;
            if (scores[a] > scores[b]) wins += 1.0;
            else if (scores[a] == scores[b]) wins += 0.5;
        }
    }
    return wins / pairs;
}

double ap_direct_oracle(std::span<const double> scores, std::span<const Label> labels) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r + 1;
    std::size_t total_a = 0;
    for (Label l : labels)
        if (l == Label::Anomaly) ++total_a;
    // sum over anomalies s of |{t in s^a : rank(t) <= rank(s)}|, then divide
    // by |s^a|^2 once: exact integer arithmetic until the final division
    std::size_t pair_count = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (labels[s] != Label::Anomaly) continue;
        for (std::size_t t = 0; t < n; ++t)
            if (labels[t] == Label::Anomaly && rank[t] <= rank[s]) ++pair_count;
    }
    return static_cast<double>(pair_count) /
           (static_cast<double>(total_a) * static_cast<double>(total_a));
}

Check metric_oracles(const Options& opts) {
    Check c;
    for (std::uint64_t trial = 0; trial < 200 && c.pass; ++trial) {
        Rng rng(substream(0x3E7A1C, trial));
        const std::size_t n = 10 + rng.bounded(191);
        std::vector<double> scores(n);
        std::vector<Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = rng.uniform();
            if (rng.bounded(3) == 0) s = std::round(s * 10.0) / 10.0;  // force ties
            scores[i] = s;
            labels[i] = rng.bounded(4) == 0 ? Label::Anomaly : Label::Normal;
        }
        labels[0] = Label::Anomaly;
        labels[1] = Label::Normal;
        const double got_auc = roc_auc(scores, labels);
        const double want_auc = auc_pairwise_oracle(scores, labels);
        c.require(got_auc == want_auc, "AUC != pairwise oracle at trial " + std::to_string(trial));
        const double got_ap = average_precision(scores, labels, true);
        const double want_ap = ap_direct_oracle(scores, labels);
        c.require(got_ap == want_ap, "AP != direct formula at trial " + std::to_string(trial));
    }

    // random scores hover around 0.5
    double sum_auc = 0.0;
    const double band = opts.inject_failure ? 1e-6 : 0.05;
    for (std::uint64_t trial = 0; trial < 100 && c.pass; ++trial) {
        Rng rng(substream(0x3E7B00, trial));
        const std::size_t n = 2000;
        std::vector<double> scores(n);
        std::vector<Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.uniform();
            labels[i] = (i % 2 == 0) ? Label::Anomaly : Label::Normal;
        }
        const double auc = roc_auc(scores, labels);
        sum_auc += auc;
        c.require(std::fabs(auc - 0.5) <= band,
                  "random-score AUC " + format_double(auc) + " at trial " + std::to_string(trial));
    }
    c.require(std::fabs(sum_auc / 100.0 - 0.5) <= 0.01,
              "mean random-score AUC " + format_double(sum_auc / 100.0));
    return c;
}

// ---------------------------------------------------------------------------
// 4. Markov blanket recovery

struct Dag10 {
    // edges of a fixed 10-node graph with chains, forks, colliders and one
    // isolated node
    std::vector<std::pair<int, int>> edges = {{0, 2}, {1, 2}, {2, 3}, {3, 4},
                                              {3, 5}, {4, 6}, {5, 6}, {7, 8}, {3, 8}};
    std::vector<std::vector<int>> true_mb = {
        {1, 2},          // 0: child 2, spouse 1
        {0, 2},          // 1
        {0, 1, 3},       // 2: parents 0,1; child 3
        {2, 4, 5, 7, 8}, // 3: parent 2; children 4,5,8; spouse 7
        {3, 5, 6},       // 4
        {3, 4, 6},       // 5
        {4, 5},          // 6
        {3, 8},          // 7: child 8, spouse 3
        {3, 7},          // 8
        {},              // 9: isolated
    };
};

Dataset sample_dag10(std::uint64_t seed, std::size_t n) {
    const Dag10 g;
    Rng rng(seed);
    std::vector<std::vector<double>> cols(10, std::vector<double>(n));
    // fixed edge weights, alternating sign, magnitude in [0.6, 1.0]
    std::vector<double> weight(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        weight[e] = (e % 2 == 0 ? 1.0 : -1.0) * (0.6 + 0.05 * static_cast<double>(e));
    for (std::size_t i = 0; i < n; ++i) {
        double x[10];
        for (int v = 0; v < 10; ++v) {
            double value = rng.normal();
            for (std::size_t e = 0; e < g.edges.size(); ++e)
                if (g.edges[e].second == v) value += weight[e] * x[g.edges[e].first];
            x[v] = value;
        }
        for (int v = 0; v < 10; ++v) cols[static_cast<std::size_t>(v)][i] = x[v];
    }
    return dataset_from_columns(std::move(cols));
}

double set_f1(const std::vector<int>& got, const std::vector<int>& want) {
    if (got.empty() && want.empty()) return 1.0;
    if (got.empty() || want.empty()) return 0.0;
    double tp = 0.0;
    for (int v : got)
        if (std::find(want.begin(), want.end(), v) != want.end()) tp += 1.0;
    const double precision = tp / static_cast<double>(got.size());
    const double recall = tp / static_cast<double>(want.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

Check mb_recovery(const Options& opts) {
    Check c;
    const Dag10 g;
    const double threshold = opts.inject_failure ? 1.01 : 0.85;
    for (SelectorMethod method : {SelectorMethod::FBED, SelectorMethod::IAMB}) {
        double f1_sum = 0.0;
        std::size_t count = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Dataset d = sample_dag10(substream(0xDA610, seed), 5000);
            SelectorConfig cfg;
            cfg.method = method;
            cfg.alpha = 0.01;
            const auto sets = select_all(d, cfg, opts.threads);
            for (int v = 0; v < 10; ++v) {
                std::vector<int> got = sets[static_cast<std::size_t>(v)].members;
                std::sort(got.begin(), got.end());
                f1_sum += set_f1(got, g.true_mb[static_cast<std::size_t>(v)]);
                ++count;
            }
        }
        const double mean_f1 = f1_sum / static_cast<double>(count);
        c.require(mean_f1 >= threshold,
                  std::string(selector_name(method)) + " mean F1 " + format_double(mean_f1));
        if (!c.pass) break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// 5. regression oracles

struct OracleSplit {
    int var = -1;
    double value = 0.0;
    double improvement = -1.0;
};

OracleSplit brute_force_split(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y, int min_bucket) {
    OracleSplit best;
    const std::size_t n = y.size();
    auto sse = [&](const std::vector<double>& vals) {
        if (vals.empty()) return 0.0;
        const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) /
                            static_cast<double>(vals.size());
        double s = 0.0;
        for (double v : vals) s += (v - mean) * (v - mean);
        return s;
    };
    const double node_sse = sse(y);
    for (std::size_t p = 0; p < X.size(); ++p) {
        std::vector<double> distinct = X[p];
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t t = 0; t + 1 < distinct.size(); ++t) {
            const double mid = 0.5 * (distinct[t] + distinct[t + 1]);
            std::vector<double> left, right;
            for (std::size_t i = 0; i < n; ++i)
                (X[p][i] < mid ? left : right).push_back(y[i]);
            if (static_cast<int>(left.size()) < min_bucket ||
                static_cast<int>(right.size()) < min_bucket)
                continue;
            const double improvement = node_sse - sse(left) - sse(right);
            if (improvement > best.improvement ||
                (improvement == best.improvement &&
                 (static_cast<int>(p) < best.var ||
                  (static_cast<int>(p) == best.var && mid < best.value)))) {
                best = {static_cast<int>(p), mid, improvement};
            }
        }
    }
    return best;
}

Check regression_oracles(const Options& opts) {
    Check c;

    // CART root split vs exhaustive oracle on 50 random 10-point problems
    for (std::uint64_t trial = 0; trial < 50 && c.pass; ++trial) {
        Rng rng(substream(0xCA27, trial));
        const std::size_t n = 10;
        std::vector<std::vector<double>> X(2, std::vector<double>(n));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            X[0][i] = rng.uniform() * 10.0;
            X[1][i] = rng.uniform() * 10.0;
            y[i] = rng.normal();
        }
        TreeHyperparams hp;
        hp.min_split = 2;
        hp.min_bucket = opts.inject_failure ? 3 : 1;
        hp.cp = 0.0;
        std::vector<ColumnView> views(X.begin(), X.end());
        const RegressionTree tree = fit_cart(views, y, hp);
        const OracleSplit want = brute_force_split(X, y, 1);
        c.require(!tree.nodes().empty() && !tree.nodes()[0].is_leaf(),
                  "tree failed to split at trial " + std::to_string(trial));
        if (!c.pass) break;
        const TreeNode& root = tree.nodes()[0];
        c.require(root.split_var == want.var && root.split_value == want.value,
                  "split (" + std::to_string(root.split_var) + "," + format_double(root.split_value) +
                      ") != oracle (" + std::to_string(want.var) + "," + format_double(want.value) +
                      ") at trial " + std::to_string(trial));
    }

    // OLS vs direct normal-equation oracle (Gaussian elimination on raw scale)
    {
        Rng rng(0x0151);
        const std::size_t n = 60, p = 3;
        std::vector<std::vector<double>> X(p, std::vector<double>(n));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) X[j][i] = rng.normal() * (1.0 + static_cast<double>(j));
            y[i] = 2.0 * X[0][i] - 1.5 * X[1][i] + 0.5 * X[2][i] + 3.0 + 0.1 * rng.normal();
        }
        // oracle: solve [1 X]' [1 X] b = [1 X]' y by Gaussian elimination
        const std::size_t q = p + 1;
        std::vector<double> a(q * q, 0.0), b(q, 0.0);
        auto xc = [&](std::size_t j, std::size_t i) { return j == 0 ? 1.0 : X[j - 1][i]; };
        for (std::size_t r = 0; r < q; ++r) {
            for (std::size_t s = 0; s < q; ++s)
                for (std::size_t i = 0; i < n; ++i) a[r * q + s] += xc(r, i) * xc(s, i);
            for (std::size_t i = 0; i < n; ++i) b[r] += xc(r, i) * y[i];
        }
        for (std::size_t col = 0; col < q; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < q; ++r)
                if (std::fabs(a[r * q + col]) > std::fabs(a[piv * q + col])) piv = r;
            for (std::size_t s = 0; s < q; ++s) std::swap(a[col * q + s], a[piv * q + s]);
            std::swap(b[col], b[piv]);
            for (std::size_t r = 0; r < q; ++r) {
                if (r == col) continue;
                const double f = a[r * q + col] / a[col * q + col];
                for (std::size_t s = 0; s < q; ++s) a[r * q + s] -= f * a[col * q + s];
                b[r] -= f * b[col];
            }
        }
        for (std::size_t r = 0; r < q; ++r) b[r] /= a[r * q + r];

        std::vector<ColumnView> views(X.begin(), X.end());
        LinearOptions ols;
        ols.kind = LinearKind::OLS;
        const LinearModel m = fit_linear(views, y, ols);
        c.require(std::fabs(m.intercept - b[0]) <= 1e-8, "OLS intercept off oracle");
        for (std::size_t j = 0; j < p; ++j)
            c.require(std::fabs(m.coefficients[j] - b[j + 1]) <= 1e-8,
                      "OLS coefficient " + std::to_string(j) + " off oracle");

        // Ridge at lambda 0 equals OLS
        LinearOptions ridge;
        ridge.kind = LinearKind::Ridge;
        ridge.lambda_grid = {0.0};
        const LinearModel r0 = fit_linear(views, y, ridge);
        c.require(std::fabs(r0.intercept - m.intercept) <= 1e-7, "Ridge(0) intercept != OLS");
        for (std::size_t j = 0; j < p; ++j)
            c.require(std::fabs(r0.coefficients[j] - m.coefficients[j]) <= 1e-7,
                      "Ridge(0) coefficient " + std::to_string(j) + " != OLS");

        // Lasso: KKT stationarity + lambda_max kills every coefficient
        const double lmax = lasso_lambda_max(views, y);
        LinearOptions lasso;
        lasso.kind = LinearKind::Lasso;
        lasso.lambda_grid = {0.25 * lmax};
        const LinearModel lm = fit_linear(views, y, lasso);
        {
            // standardized KKT residual check
            std::vector<double> mean(p), scale(p);
            std::vector<std::vector<double>> z(p, std::vector<double>(n));
            for (std::size_t j = 0; j < p; ++j) {
                double mu = std::accumulate(X[j].begin(), X[j].end(), 0.0) / static_cast<double>(n);
                double ssn = 0.0;
                for (double v : X[j]) ssn += (v - mu) * (v - mu);
                const double sd = std::sqrt(ssn / static_cast<double>(n));
                mean[j] = mu;
                scale[j] = sd;
                for (std::size_t i = 0; i < n; ++i) z[j][i] = (X[j][i] - mu) / sd;
            }
            const double ymu = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
            std::vector<double> beta_std(p);
            for (std::size_t j = 0; j < p; ++j) beta_std[j] = lm.coefficients[j] * scale[j];
            std::vector<double> resid(n);
            for (std::size_t i = 0; i < n; ++i) {
                double fit = 0.0;
                for (std::size_t j = 0; j < p; ++j) fit += beta_std[j] * z[j][i];
                resid[i] = (y[i] - ymu) - fit;
            }
            const double lambda = lm.lambda;
            const double tol = opts.inject_failure ? 1e-12 : 1e-5;
            for (std::size_t j = 0; j < p; ++j) {
                double grad = 0.0;
                for (std::size_t i = 0; i < n; ++i) grad += z[j][i] * resid[i];
                grad /= static_cast<double>(n);
                if (beta_std[j] == 0.0) {
                    c.require(std::fabs(grad) <= lambda + tol,
                              "lasso KKT violated on zero coefficient " + std::to_string(j));
                } else {
                    c.require(std::fabs(grad - lambda * (beta_std[j] > 0 ? 1.0 : -1.0)) <= tol,
                              "lasso KKT violated on active coefficient " + std::to_string(j));
                }
            }
        }
        LinearOptions lasso_max;
        lasso_max.kind = LinearKind::Lasso;
        lasso_max.lambda_grid = {lmax * 1.0000001};
        const LinearModel dead = fit_linear(views, y, lasso_max);
        for (std::size_t j = 0; j < p; ++j)
            c.require(dead.coefficients[j] == 0.0, "lasso at lambda_max kept coefficient " + std::to_string(j));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 6. Example-1 style reproduction (on-curve extreme vs off-curve anomalies)

struct Example1 {
    Dataset data;
    std::vector<std::size_t> planted;  // 5 off-curve objects
    std::size_t extreme = 0;           // the on-curve marginal extreme
};

// Age/weight-style curve: a bump over the lower range that settles onto a
// flat plateau. The marginal extreme continues the plateau past the data
// range, so it violates no dependency; a short second plateau at the left
// edge shares its y-level and carries even larger inverse-prediction
// residuals, which is exactly what keeps a dependency method quiet about
// the extreme while every planted object breaks the curve vertically.
Example1 make_example1(std::uint64_t seed) {
    const std::size_t n_curve = 450;
    const double noise_sd = 1.0;
    const double planted_offset = 8.5;
    auto f = [](double x) {
        const double t = (x - 20.0) / 9.0;
        return 20.0 + 22.0 * std::exp(-t * t);
    };
    Rng rng(substream(0xE61, seed));
    std::vector<double> xs, ys;
    xs.reserve(n_curve + 6);
    ys.reserve(n_curve + 6);
    for (std::size_t i = 0; i < n_curve; ++i) {
        const double u = rng.uniform();
        double x;
        if (u < 0.15) x = 6.0 * rng.uniform();              // left plateau
        else if (u < 0.45) x = 6.0 + 32.0 * rng.uniform();  // bump
        else x = 38.0 + 32.0 * rng.uniform();               // right plateau
        xs.push_back(x);
        ys.push_back(f(x) + noise_sd * rng.normal());
    }
    std::vector<std::size_t> planted;
    // planted objects sit on locally flat stretches so their vertical
    // offset is the whole story
    const double planted_x[5] = {3.0, 20.0, 45.0, 55.0, 65.0};
    const double planted_sign[5] = {+1.0, -1.0, +1.0, -1.0, +1.0};
    for (int p = 0; p < 5; ++p) {
        planted.push_back(xs.size());
        xs.push_back(planted_x[p] + rng.uniform());
        ys.push_back(f(planted_x[p]) + planted_sign[p] * planted_offset);
    }
    // the on-curve extreme: past the right edge, still on the plateau
    const std::size_t extreme = xs.size();
    xs.push_back(77.0);
    ys.push_back(f(77.0));
    return Example1{dataset_from_columns({std::move(xs), std::move(ys)}), planted, extreme};
}

Check example1_reproduction(const Options& opts) {
    Check c;
    const std::size_t rank_bound = opts.inject_failure ? 1 : 45;
    for (std::uint64_t seed = 1; seed <= 10 && c.pass; ++seed) {
        const Example1 ex = make_example1(seed);

        PipelineConfig cfg;
        cfg.selector.method = SelectorMethod::FBED;
        cfg.model_kind = ModelKind::CART;
        cfg.combiner = Combiner::PS;
        cfg.seed = substream(0xE62, seed);
        const ScoreVector scores = run(ex.data, cfg, opts.threads);
        const auto ranks = scores.ranks();

        for (std::size_t p : ex.planted)
            c.require(ranks[p] <= 10, "planted object rank " + std::to_string(ranks[p]) +
                                          " at seed " + std::to_string(seed));
        c.require(ranks[ex.extreme] > rank_bound,
                  "on-curve extreme rank " + std::to_string(ranks[ex.extreme]) +
                      " at seed " + std::to_string(seed));

        const ScoreVector knn = baseline_score(ex.data, BaselineConfig{BaselineMethod::WKNN, 10});
        const auto knn_ranks = knn.ranks();
        c.require(knn_ranks[ex.extreme] == 1,
                  "wkNN rank of on-curve extreme is " + std::to_string(knn_ranks[ex.extreme]) +
                      " at seed " + std::to_string(seed));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 7. Zoo case study

Check zoo_case_study(const Options& opts) {
    Check c;
    IngestOptions ingest;
    ingest.id_column = "animal";
    ingest.label_column = "class_type";
    const Dataset zoo = ingest_csv_text(zoo_csv(), ingest, "zoo");
    c.require(zoo.n_rows() == 101 && zoo.n_vars() == 16, "zoo shape unexpected");

    int passes = 0;
    std::string last_fail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PipelineConfig cfg;
        cfg.selector.method = SelectorMethod::FBED;
        cfg.model_kind = ModelKind::CART;
        cfg.combiner = Combiner::PS;
        cfg.seed = seed;
        const DependencyModelSet models = train(zoo, cfg, opts.threads);
        const DeviationMatrix dev = deviations(zoo, models, opts.threads);
        const ScoreVector scores = combine(dev, cfg.combiner, cfg.eta);
        const auto order = scores.order_by_score();

        std::vector<std::string> top5;
        for (std::size_t r = 0; r < 5; ++r) top5.push_back(zoo.row_ids()[order[r]]);
        auto in_top5 = [&](const std::string& name) {
            return std::find(top5.begin(), top5.end(), name) != top5.end();
        };
        bool ok = in_top5("scorpion") && in_top5("platypus") && in_top5("seasnake");
        if (!ok) {
            std::string joined;
            for (const auto& t : top5) joined += t + " ";
            last_fail = "top5 = " + joined + "(seed " + std::to_string(seed) + ")";
        } else {
            const int scorpion = static_cast<int>(
                std::find(zoo.row_ids().begin(), zoo.row_ids().end(), "scorpion") -
                zoo.row_ids().begin());
            const ExplainReport report =
                explain(zoo, models, dev, static_cast<std::size_t>(scorpion), 3);
            bool backbone_ok = false;
            for (const auto& e : report.entries) {
                if (e.variable_name == "backbone" && e.observed == 0.0 && e.expected > 0.5)
                    backbone_ok = true;
            }
            if (!backbone_ok) {
                ok = false;
                last_fail = "scorpion top-3 lacks backbone(obs 0, exp > 0.5) at seed " +
                            std::to_string(seed);
            }
        }
        if (ok) ++passes;
    }
    const int needed = opts.inject_failure ? 6 : 4;
    c.require(passes >= needed,
              std::to_string(passes) + "/5 seeds passed; last failure: " + last_fail);
    return c;
}

// ---------------------------------------------------------------------------
// 8. determinism across thread counts

std::string make_numeric_csv(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::string csv = "a,b,c,d,e,f\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        const double b = 0.8 * a + 0.3 * rng.normal();
        const double c2 = rng.normal();
        const double d = c2 - 0.5 * b + 0.2 * rng.normal();
        const double e = rng.uniform() * 4.0;
        const double f2 = 0.6 * e + 0.4 * rng.normal();
        csv += format_double(a) + "," + format_double(b) + "," + format_double(c2) + "," +
               format_double(d) + "," + format_double(e) + "," + format_double(f2) + "\n";
    }
    return csv;
}

std::string make_mixed_csv(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    const char* colors[3] = {"red", "green", "blue"};
    std::string csv = "u,v,w,color\n";
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = rng.bounded(3);
        const double u = rng.normal() + static_cast<double>(k);
        const double v = 0.5 * u + 0.3 * rng.normal();
        const double w = rng.normal();
        csv += format_double(u) + "," + format_double(v) + "," + format_double(w) + "," +
               colors[k] + "\n";
    }
    return csv;
}

Check determinism_threads(const Options& opts) {
    Check c;
    const fs::path root = fs::temp_directory_path() / ("depad_selftest_" + std::to_string(
                              std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(root);

    struct Case {
        std::string name;
        std::string csv;
        std::string fs, model, score;
        std::string extra;
    };
    const std::vector<Case> cases = {
        {"numeric", make_numeric_csv(0xD1, 400), "fbed", "cart", "ps", ""},
        {"mixed", make_mixed_csv(0xD2, 300), "mi", "ols", "sum", ""},
        {"zoo", std::string(zoo_csv()), "fbed", "mcart", "rzps",
         " --id-col animal --label-col class_type"},
    };

    for (const auto& kase : cases) {
        if (!c.pass) break;
        const fs::path csv_path = root / (kase.name + ".csv");
        atomic_write_file(csv_path, kase.csv);

        auto scores_bytes = [&](unsigned threads, const std::string& out_name) -> std::string {
            const fs::path out_dir = root / out_name;
            if (!opts.cli_path.empty()) {
                std::string cmd = opts.cli_path + " detect --data " + csv_path.string() +
                                  " --fs " + kase.fs + " --model " + kase.model + " --score " +
                                  kase.score + " --seed 7 --threads " + std::to_string(threads) +
                                  " --out " + out_dir.string() + kase.extra + " >/dev/null 2>&1";
                if (std::system(cmd.c_str()) != 0)
                    throw std::runtime_error("detect failed for " + kase.name);
                return read_file(out_dir / "scores.csv");
            }
            IngestOptions ingest;
            if (kase.name == "zoo") {
                ingest.id_column = "animal";
                ingest.label_column = "class_type";
            }
            const Dataset d = ingest_csv_text(kase.csv, ingest, kase.name);
            PipelineConfig cfg;
            cfg.selector.method = *selector_from_name(kase.fs);
            cfg.model_kind = *model_kind_from_name(kase.model);
            cfg.combiner = *combiner_from_name(kase.score);
            cfg.seed = 7;
            const ScoreVector s = run(d, cfg, threads);
            return scores_to_csv(s, d.row_ids());
        };

        try {
            const std::string one = scores_bytes(1, kase.name + "_t1");
            std::string eight = scores_bytes(8, kase.name + "_t8");
            if (opts.inject_failure) eight += "tampered";
            c.require(one == eight, "scores differ across thread counts on " + kase.name);
        } catch (const std::exception& e) {
            c.require(false, std::string("determinism case threw: ") + e.what());
        }
    }
    fs::remove_all(root);
    return c;
}

// ---------------------------------------------------------------------------
// 9. benchmark protocol end to end

Check benchmark_protocol(const Options& opts) {
    Check c;
    // labeled synthetic set: normals follow x1 -> x2/x3 dependencies,
    // anomalies keep the marginals but break the relationship
    Rng rng(0xBE9C);
    const std::size_t n_normal = 480, n_anomaly = 120;
    std::vector<std::vector<double>> cols(3);
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n_normal; ++i) {
        const double x1 = rng.normal();
        cols[0].push_back(x1);
        cols[1].push_back(2.0 * x1 + 0.25 * rng.normal());
        cols[2].push_back(-x1 + 0.25 * rng.normal());
        labels.push_back(Label::Normal);
    }
    for (std::size_t i = 0; i < n_anomaly; ++i) {
        const double x1 = rng.normal();
        cols[0].push_back(x1);
        cols[1].push_back(2.0 * rng.normal());  // marginal kept, dependency broken
        cols[2].push_back(rng.normal());
        labels.push_back(Label::Anomaly);
    }
    const Dataset d = dataset_from_columns(std::move(cols), labels);

    PipelineConfig defaults;
    defaults.seed = 11;
    const auto method = parse_method("fbed-cart-ps", defaults);
    BenchmarkSpec spec;
    spec.repeats = 20;
    spec.rng_seed = 5;
    const auto reports = run_benchmark(d, {*method}, spec, opts.threads);

    c.require(reports.size() == 1 && reports[0].error.empty(), "benchmark run failed");
    if (!c.pass) return c;
    c.require(reports[0].trials.size() == 20,
              "expected 20 trials, got " + std::to_string(reports[0].trials.size()));

    // random-score control on the same trials
    const auto trials = sample_benchmark(d, spec);
    std::vector<double> control_auc;
    for (std::size_t t = 0; t < trials.size(); ++t) {
        Rng crng(substream(0xC0117801, t));
        std::vector<double> s(trials[t].n_rows());
        for (double& v : s) v = crng.uniform();
        control_auc.push_back(roc_auc(s, trials[t].labels()));
    }
    const auto depad_auc = reports[0].auc_list();
    const double mean_depad = std::accumulate(depad_auc.begin(), depad_auc.end(), 0.0) /
                              static_cast<double>(depad_auc.size());
    const double mean_control = std::accumulate(control_auc.begin(), control_auc.end(), 0.0) /
                                static_cast<double>(control_auc.size());
    const double margin = opts.inject_failure ? 1.0 : 0.3;
    c.require(mean_depad - mean_control >= margin,
              "AUC margin " + format_double(mean_depad - mean_control));

    const RankSumResult rs = rank_sum_test(depad_auc, control_auc, Alternative::Greater);
    c.require(rs.p_value < 0.01, "rank-sum p " + format_double(rs.p_value));
    return c;
}

struct Criterion {
    const char* name;
    std::function<Check(const Options&)> fn;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {"normalization_contract", normalization_contract},
        {"combination_correctness", combination_correctness},
        {"metric_oracles", metric_oracles},
        {"mb_recovery", mb_recovery},
        {"regression_oracles", regression_oracles},
        {"example1_reproduction", example1_reproduction},
        {"zoo_case_study", zoo_case_study},
        {"determinism_threads", determinism_threads},
        {"benchmark_protocol", benchmark_protocol},
    };
    return list;
}

} // namespace

int run(const Options& opts, std::ostream& out) {
    if (opts.list_only) {
        for (const auto& criterion : criteria()) out << criterion.name << "\n";
        return 0;
    }
    int failures = 0;
    for (const auto& criterion : criteria()) {
        if (!opts.filter.empty() &&
            std::string(criterion.name).find(opts.filter) == std::string::npos)
            continue;
        const auto start = std::chrono::steady_clock::now();
        Check result;
        try {
            result = criterion.fn(opts);
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.1fs", seconds);
        out << (result.pass ? "[PASS] " : "[FAIL] ") << criterion.name << " (" << timing << ")";
        if (!result.pass) out << " - " << result.detail;
        out << "\n";
        if (!result.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

} // namespace depad::selftest
