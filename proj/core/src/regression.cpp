#include "depad/regression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "depad/parallel.hpp"
#include "depad/rng.hpp"

namespace depad {

namespace {

double mean_of(std::span<const double> v, std::span<const int> idx) {
    double s = 0.0;
    for (int i : idx) s += v[static_cast<std::size_t>(i)];
    return s / static_cast<double>(idx.size());
}

double sse_of(std::span<const double> v, std::span<const int> idx, double mean) {
    double s = 0.0;
    for (int i : idx) {
        const double dlt = v[static_cast<std::size_t>(i)] - mean;
        s += dlt * dlt;
    }
    return s;
}

struct SplitChoice {
    int var = -1;
    double value = 0.0;
    double improvement = -1.0;  // SSE(node) - SSE(left) - SSE(right)
};

// Exact search over midpoints of consecutive distinct sorted values.
SplitChoice best_split(std::span<const ColumnView> X, std::span<const double> y,
                       std::span<const int> idx, const TreeHyperparams& hp) {
    SplitChoice best;
    const std::size_t n = idx.size();
    std::vector<int> order(idx.begin(), idx.end());
    std::vector<double> prefix_y(n + 1, 0.0), prefix_yy(n + 1, 0.0);

    for (std::size_t p = 0; p < X.size(); ++p) {
        const ColumnView col = X[p];
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double va = col[static_cast<std::size_t>(a)];
            const double vb = col[static_cast<std::size_t>(b)];
            if (va != vb) return va < vb;
            return a < b;
        });
        for (std::size_t t = 0; t < n; ++t) {
            const double yv = y[static_cast<std::size_t>(order[t])];
            prefix_y[t + 1] = prefix_y[t] + yv;
            prefix_yy[t + 1] = prefix_yy[t] + yv * yv;
        }
        const double total_y = prefix_y[n];
        const double total_yy = prefix_yy[n];
        const double node_sse = total_yy - total_y * total_y / static_cast<double>(n);

        const std::size_t bucket = static_cast<std::size_t>(std::max(1, hp.min_bucket));
        for (std::size_t t = bucket; t + bucket <= n; ++t) {
            const double lo = col[static_cast<std::size_t>(order[t - 1])];
            const double hi = col[static_cast<std::size_t>(order[t])];
            if (lo == hi) continue;  // not a boundary between distinct values
            const double nl = static_cast<double>(t);
            const double nr = static_cast<double>(n - t);
            const double sse_l = prefix_yy[t] - prefix_y[t] * prefix_y[t] / nl;
            const double sse_r = (total_yy - prefix_yy[t]) -
                                 (total_y - prefix_y[t]) * (total_y - prefix_y[t]) / nr;
            const double improvement = node_sse - sse_l - sse_r;
            const double value = 0.5 * (lo + hi);
            if (improvement > best.improvement ||
                (improvement == best.improvement &&
                 (static_cast<int>(p) < best.var ||
                  (static_cast<int>(p) == best.var && value < best.value)))) {
                best = {static_cast<int>(p), value, improvement};
            }
        }
    }
    return best;
}

int build_node(std::span<const ColumnView> X, std::span<const double> y,
               std::vector<int>& idx, const TreeHyperparams& hp, double root_sse,
               std::vector<TreeNode>& nodes) {
    TreeNode node;
    node.count = static_cast<int>(idx.size());
    node.prediction = mean_of(y, idx);
    const int self = static_cast<int>(nodes.size());
    nodes.push_back(node);

    if (node.count < hp.min_split || X.empty() || root_sse <= 0.0) return self;

    const SplitChoice split = best_split(X, y, idx, hp);
    if (split.var < 0) return self;
    if (split.improvement < hp.cp * root_sse) return self;

    std::vector<int> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    const ColumnView col = X[static_cast<std::size_t>(split.var)];
    for (int i : idx) {
        if (col[static_cast<std::size_t>(i)] < split.value) left_idx.push_back(i);
        else right_idx.push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes[static_cast<std::size_t>(self)].split_var = split.var;
    nodes[static_cast<std::size_t>(self)].split_value = split.value;
    const int left = build_node(X, y, left_idx, hp, root_sse, nodes);
    nodes[static_cast<std::size_t>(self)].left = left;
    const int right = build_node(X, y, right_idx, hp, root_sse, nodes);
    nodes[static_cast<std::size_t>(self)].right = right;
    return self;
}

} // namespace

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes_.empty()) throw std::logic_error("predict on empty tree");
    int cur = 0;
    while (!nodes_[static_cast<std::size_t>(cur)].is_leaf()) {
        const TreeNode& node = nodes_[static_cast<std::size_t>(cur)];
        cur = (x[static_cast<std::size_t>(node.split_var)] < node.split_value) ? node.left
                                                                               : node.right;
    }
    return nodes_[static_cast<std::size_t>(cur)].prediction;
}

RegressionTree fit_cart(std::span<const ColumnView> X, std::span<const double> y,
                        const TreeHyperparams& hp) {
    if (y.empty()) throw std::invalid_argument("fit_cart: empty target");
    for (const auto& col : X)
        if (col.size() != y.size()) throw std::invalid_argument("fit_cart: column length mismatch");

    std::vector<int> idx(y.size());
    std::iota(idx.begin(), idx.end(), 0);
    const double root_mean = mean_of(y, idx);
    const double root_sse = sse_of(y, idx, root_mean);

    std::vector<TreeNode> nodes;
    build_node(X, y, idx, hp, root_sse, nodes);
    return RegressionTree(std::move(nodes), hp);
}

double BaggedModel::predict(std::span<const double> x) const {
    if (trees.empty()) throw std::logic_error("predict on empty ensemble");
    std::vector<double> preds;
    preds.reserve(trees.size());
    for (const auto& t : trees) preds.push_back(t.predict(x));
    if (aggregate == Aggregate::Mean) {
        return std::accumulate(preds.begin(), preds.end(), 0.0) /
               static_cast<double>(preds.size());
    }
    std::sort(preds.begin(), preds.end());
    const std::size_t n = preds.size();
    return (n % 2 == 1) ? preds[n / 2] : 0.5 * (preds[n / 2 - 1] + preds[n / 2]);
}

BaggedModel fit_bagged(std::span<const ColumnView> X, std::span<const double> y,
                       const BaggedOptions& opts) {
    if (opts.n_trees < 1) throw std::invalid_argument("fit_bagged: n_trees must be >= 1");
    const std::size_t n = y.size();

    BaggedModel model;
    model.aggregate = opts.aggregate;
    model.seed = opts.seed;
    model.trees.resize(static_cast<std::size_t>(opts.n_trees));

    parallel_for(static_cast<std::size_t>(opts.n_trees), opts.threads, [&](std::size_t t) {
        if (!opts.bootstrap) {
            model.trees[t] = fit_cart(X, y, opts.tree);
            return;
        }
        Rng rng(substream(opts.seed, t));
        std::vector<double> yb(n);
        std::vector<std::vector<double>> xb(X.size(), std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pick = rng.bounded(n);
            yb[i] = y[pick];
            for (std::size_t p = 0; p < X.size(); ++p) xb[p][i] = X[p][pick];
        }
        std::vector<ColumnView> views(xb.begin(), xb.end());
        model.trees[t] = fit_cart(views, yb, opts.tree);
    });
    return model;
}

double LinearModel::predict(std::span<const double> x) const {
    double v = intercept;
    for (std::size_t p = 0; p < coefficients.size(); ++p) v += coefficients[p] * x[p];
    return v;
}

namespace {

struct Standardized {
    std::vector<std::vector<double>> z;  // standardized columns
    std::vector<double> mean, scale;     // scale: population sd, 1.0 when constant
    std::vector<double> yc;              // centered target
    double y_mean = 0.0;
};

Standardized standardize(std::span<const ColumnView> X, std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t p = X.size();
    Standardized s;
    s.z.resize(p);
    s.mean.resize(p);
    s.scale.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (double v : X[j]) m += v;
        m /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : X[j]) ss += (v - m) * (v - m);
        double sd = std::sqrt(ss / static_cast<double>(n));
        if (sd <= 0.0) sd = 1.0;  // constant column: contributes nothing
        s.mean[j] = m;
        s.scale[j] = sd;
        s.z[j].resize(n);
        for (std::size_t i = 0; i < n; ++i) s.z[j][i] = (X[j][i] - m) / sd;
    }
    s.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    s.yc.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.yc[i] = y[i] - s.y_mean;
    return s;
}

// Solve (Z'Z + ridge I) b = Z'y by Cholesky; jitter on failure.
std::vector<double> solve_normal_equations(const std::vector<std::vector<double>>& z,
                                           const std::vector<double>& yc, double ridge) {
    const std::size_t p = z.size();
    const std::size_t n = yc.size();
    std::vector<double> gram(p * p), rhs(p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += z[a][i] * z[b][i];
            gram[a * p + b] = gram[b * p + a] = dot;
        }
        gram[a * p + a] += ridge;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += z[a][i] * yc[i];
        rhs[a] = dot;
    }
    // in-place Cholesky solve; on singularity retry with 1e-10 jitter
    auto try_solve = [&](std::vector<double> a, std::vector<double> b,
                         std::vector<double>& out) {
        for (std::size_t k = 0; k < p; ++k) {
            double diag = a[k * p + k];
            for (std::size_t r = 0; r < k; ++r) diag -= a[k * p + r] * a[k * p + r];
            if (diag <= 0.0) return false;
            a[k * p + k] = std::sqrt(diag);
            for (std::size_t i = k + 1; i < p; ++i) {
                double v = a[i * p + k];
                for (std::size_t r = 0; r < k; ++r) v -= a[i * p + r] * a[k * p + r];
                a[i * p + k] = v / a[k * p + k];
            }
        }
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
        out = std::move(b);
        return true;
    };
    std::vector<double> beta;
    if (!try_solve(gram, rhs, beta)) {
        std::vector<double> jittered = gram;
        for (std::size_t a = 0; a < p; ++a)
            jittered[a * p + a] += 1e-10 * (1.0 + gram[a * p + a]);
        if (!try_solve(jittered, rhs, beta))
            throw std::runtime_error("fit_linear: Gram matrix unsolvable even with jitter");
    }
    return beta;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// Cyclic coordinate descent for (1/2n)||y - Zb||^2 + lambda ||b||_1 on
// standardized columns (so each coordinate denominator is ~1).
std::vector<double> lasso_cd(const std::vector<std::vector<double>>& z,
                             const std::vector<double>& yc, double lambda,
                             std::vector<double> beta0) {
    const std::size_t p = z.size();
    const std::size_t n = yc.size();
    const double dn = static_cast<double>(n);
    std::vector<double> beta = std::move(beta0);
    if (beta.size() != p) beta.assign(p, 0.0);

    std::vector<double> residual = yc;
    for (std::size_t j = 0; j < p; ++j) {
        if (beta[j] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) residual[i] -= z[j][i] * beta[j];
    }
    std::vector<double> col_norm(p);
    for (std::size_t j = 0; j < p; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += z[j][i] * z[j][i];
        col_norm[j] = dot / dn;  // ~1 for non-constant standardized columns
    }

    for (int iter = 0; iter < 10000; ++iter) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (col_norm[j] <= 0.0) { beta[j] = 0.0; continue; }
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += z[j][i] * residual[i];
            rho = rho / dn + col_norm[j] * beta[j];
            const double updated = soft_threshold(rho, lambda) / col_norm[j];
            const double delta = updated - beta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) residual[i] -= z[j][i] * delta;
                beta[j] = updated;
            }
            max_delta = std::max(max_delta, std::fabs(delta));
        }
        if (max_delta < 1e-7) break;
    }
    return beta;
}

std::vector<double> fit_standardized(const std::vector<std::vector<double>>& z,
                                     const std::vector<double>& yc, LinearKind kind,
                                     double lambda, const std::vector<double>& warm) {
    const double dn = static_cast<double>(yc.size());
    switch (kind) {
        case LinearKind::OLS:
            return solve_normal_equations(z, yc, 0.0);
        case LinearKind::Ridge:
            // objective (1/2n)||y - Zb||^2 + (lambda/2)||b||^2
            return solve_normal_equations(z, yc, lambda * dn);
        case LinearKind::Lasso:
            return lasso_cd(z, yc, lambda, warm);
    }
    throw std::logic_error("unknown linear kind");
}

double cv_mse(std::span<const ColumnView> X, std::span<const double> y,
              LinearKind kind, double lambda, const std::vector<int>& fold_of,
              int folds) {
    const std::size_t n = y.size();
    double total_sq = 0.0;
    for (int f = 0; f < folds; ++f) {
        std::vector<std::vector<double>> xtr(X.size());
        std::vector<double> ytr;
        std::vector<std::size_t> val_rows;
        for (std::size_t i = 0; i < n; ++i) {
            if (fold_of[i] == f) {
                val_rows.push_back(i);
            } else {
                for (std::size_t p = 0; p < X.size(); ++p) xtr[p].push_back(X[p][i]);
                ytr.push_back(y[i]);
            }
        }
        if (ytr.size() < 2 || val_rows.empty()) continue;
        std::vector<ColumnView> views(xtr.begin(), xtr.end());
        LinearOptions sub;
        sub.kind = kind;
        sub.lambda_grid = {lambda};
        sub.cv_folds = 0;  // direct fit at this lambda
        const LinearModel m = fit_linear(views, ytr, sub);
        for (std::size_t i : val_rows) {
            std::vector<double> row(X.size());
            for (std::size_t p = 0; p < X.size(); ++p) row[p] = X[p][i];
            const double err = y[i] - m.predict(row);
            total_sq += err * err;
        }
    }
    return total_sq / static_cast<double>(n);
}

} // namespace

double lasso_lambda_max(std::span<const ColumnView> X, std::span<const double> y) {
    if (X.empty()) return 0.0;
    const Standardized s = standardize(X, y);
    const double dn = static_cast<double>(y.size());
    double best = 0.0;
    for (std::size_t j = 0; j < s.z.size(); ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < s.yc.size(); ++i) dot += s.z[j][i] * s.yc[i];
        best = std::max(best, std::fabs(dot) / dn);
    }
    return best;
}

LinearModel fit_linear(std::span<const ColumnView> X, std::span<const double> y,
                       const LinearOptions& opts) {
    if (y.size() < 2) throw std::invalid_argument("fit_linear: need at least 2 rows");
    for (const auto& col : X)
        if (col.size() != y.size()) throw std::invalid_argument("fit_linear: column length mismatch");

    LinearModel model;
    model.kind = opts.kind;

    if (X.empty()) {
        model.intercept = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        return model;
    }

    const Standardized s = standardize(X, y);

    double lambda = 0.0;
    if (opts.kind != LinearKind::OLS) {
        std::vector<double> grid = opts.lambda_grid;
        if (grid.empty()) {
            double lmax = lasso_lambda_max(X, y);
            if (lmax <= 0.0) lmax = 1e-3;
            grid.resize(50);
            const double lo = std::log(1e-4 * lmax), hi = std::log(lmax);
            for (std::size_t g = 0; g < grid.size(); ++g)
                grid[g] = std::exp(hi + (lo - hi) * static_cast<double>(g) / 49.0);
        }
        if (grid.size() == 1 || opts.cv_folds < 2) {
            lambda = grid.front();
        } else {
            const std::size_t n = y.size();
            const int folds = std::min<int>(opts.cv_folds, static_cast<int>(n));
            std::vector<int> fold_of(n);
            for (std::size_t i = 0; i < n; ++i) fold_of[i] = static_cast<int>(i % static_cast<std::size_t>(folds));
            Rng rng(substream(opts.seed, 0x1a550cdULL));
            for (std::size_t i = n; i-- > 1;) {
                const std::size_t pick = rng.bounded(i + 1);
                std::swap(fold_of[i], fold_of[pick]);
            }
            // grid is descending; ties at the minimum keep the larger lambda
            std::sort(grid.begin(), grid.end(), std::greater<>());
            double best_mse = std::numeric_limits<double>::infinity();
            for (double cand : grid) {
                const double mse = cv_mse(X, y, opts.kind, cand, fold_of, folds);
                if (mse < best_mse) {
                    best_mse = mse;
                    lambda = cand;
                }
            }
        }
    }

    const std::vector<double> beta_std =
        fit_standardized(s.z, s.yc, opts.kind, lambda, {});
    model.lambda = lambda;
    model.predictor_mean = s.mean;
    model.predictor_scale = s.scale;
    model.coefficients.resize(beta_std.size());
    double intercept = s.y_mean;
    for (std::size_t j = 0; j < beta_std.size(); ++j) {
        model.coefficients[j] = beta_std[j] / s.scale[j];
        intercept -= model.coefficients[j] * s.mean[j];
    }
    model.intercept = intercept;
    return model;
}

double Predictor::predict(std::span<const double> row) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) return m.value;
            else return m.predict(row);
        },
        model);
}

double Predictor::predict_row(const Dataset& d, std::size_t i) const {
    std::vector<double> row(predictors.members.size());
    for (std::size_t p = 0; p < row.size(); ++p)
        row[p] = d.value(i, static_cast<std::size_t>(predictors.members[p]));
    return predict(row);
}

} // namespace depad
