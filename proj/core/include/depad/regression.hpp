#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "depad/feature_selection.hpp"

namespace depad {

// Predictor columns are borrowed views; callers keep the backing storage
// alive for the duration of a fit.
using ColumnView = std::span<const double>;

struct TreeHyperparams {
    int min_split = 20;   // smallest node that may be split
    int min_bucket = 7;   // smallest allowed child
    double cp = 0.003;    // split must improve SSE by cp * SSE(root)
};

struct TreeNode {
    int split_var = -1;      // predictor index; -1 marks a leaf
    double split_value = 0.0;
    int left = -1;
    int right = -1;
    double prediction = 0.0; // mean of the node's training targets
    int count = 0;

    bool is_leaf() const { return split_var < 0; }
};

class RegressionTree {
public:
    RegressionTree() = default;
    RegressionTree(std::vector<TreeNode> nodes, TreeHyperparams hp)
        : nodes_(std::move(nodes)), hp_(hp) {}

    double predict(std::span<const double> x) const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeHyperparams& hyperparams() const { return hp_; }

private:
    std::vector<TreeNode> nodes_;
    TreeHyperparams hp_;
};

// Greedy SSE-reduction splitting over midpoints of consecutive distinct
// sorted predictor values. Ties break toward the lowest predictor index,
// then the lowest split value. Zero predictors give a single-leaf tree.
RegressionTree fit_cart(std::span<const ColumnView> X, std::span<const double> y,
                        const TreeHyperparams& hp);

enum class Aggregate { Mean, Median };

struct BaggedModel {
    std::vector<RegressionTree> trees;
    Aggregate aggregate = Aggregate::Mean;
    std::uint64_t seed = 0;

    double predict(std::span<const double> x) const;
};

struct BaggedOptions {
    int n_trees = 25;
    Aggregate aggregate = Aggregate::Mean;
    std::uint64_t seed = 0;
    TreeHyperparams tree;
    bool bootstrap = true;  // test hook: off trains every tree on the full sample
    unsigned threads = 1;
};

// Each tree trains on an n-draw bootstrap resample from its own seed
// substream, so the ensemble is bit-identical under any thread count.
BaggedModel fit_bagged(std::span<const ColumnView> X, std::span<const double> y,
                       const BaggedOptions& opts);

enum class LinearKind { OLS, Ridge, Lasso };

struct LinearModel {
    std::vector<double> coefficients;  // original predictor scale
    double intercept = 0.0;
    LinearKind kind = LinearKind::OLS;
    double lambda = 0.0;
    // standardization used during fitting, for inspection/serialization
    std::vector<double> predictor_mean;
    std::vector<double> predictor_scale;

    double predict(std::span<const double> x) const;
};

struct LinearOptions {
    LinearKind kind = LinearKind::OLS;
    std::vector<double> lambda_grid;  // empty = 50 log-spaced in [1e-4, 1] * lambda_max
    int cv_folds = 10;
    std::uint64_t seed = 0;
};

// OLS by normal equations (1e-10 ridge jitter on singular Gram matrices),
// Ridge closed-form and Lasso cyclic coordinate descent, both on
// standardized predictors with lambda chosen by cross-validated MSE.
LinearModel fit_linear(std::span<const ColumnView> X, std::span<const double> y,
                       const LinearOptions& opts);

// glmnet-style critical lambda: max_j |<x_j standardized, y centered>| / n.
double lasso_lambda_max(std::span<const ColumnView> X, std::span<const double> y);

struct ConstantModel {
    double value = 0.0;  // training median of the target
};

// A trained dependency model for one variable.
struct Predictor {
    int target = 0;
    RelevantSet predictors;
    std::variant<ConstantModel, BaggedModel, LinearModel> model;

    // `row` supplies the values of predictors.members, in that order.
    double predict(std::span<const double> row) const;
    double predict_row(const Dataset& d, std::size_t i) const;
    bool is_fallback() const { return std::holds_alternative<ConstantModel>(model); }
};

} // namespace depad
