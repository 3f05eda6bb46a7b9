#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depad/dataset.hpp"
#include "depad/regression.hpp"

namespace depad {

enum class ModelKind { CART, MCART, OLS, Ridge, Lasso };
enum class Combiner { RZPS, PS, Sum, Max, GS };

const char* model_kind_name(ModelKind m);
const char* combiner_name(Combiner c);
std::optional<ModelKind> model_kind_from_name(const std::string& name);
std::optional<Combiner> combiner_from_name(const std::string& name);

struct PipelineConfig {
    SelectorConfig selector;
    ModelKind model_kind = ModelKind::CART;
    Combiner combiner = Combiner::PS;
    double eta = 0.0;          // PS/RZPS pruning threshold
    std::uint64_t seed = 0;
    int n_trees = 25;
    TreeHyperparams tree;
    int cv_folds = 10;

    // "FBED-CART-PS" style acronym string
    std::string instantiation_name() const;
};

// Raw and robust-Z normalized per-object-per-variable deviations.
struct DeviationMatrix {
    std::size_t n = 0, m = 0;
    std::vector<double> raw;         // |x_ij - xhat_ij|, row-major n x m
    std::vector<double> normalized;  // (raw - median_j) / aad_j
    std::vector<std::pair<double, double>> per_variable_stats;  // (median, aad)
    std::vector<bool> degenerate;    // aad_j == 0: normalized column all zeros

    double raw_at(std::size_t i, std::size_t j) const { return raw[i * m + j]; }
    double norm_at(std::size_t i, std::size_t j) const { return normalized[i * m + j]; }
};

struct ScoreVector {
    std::vector<double> scores;
    Combiner combiner = Combiner::PS;
    double eta = 0.0;

    // object indices sorted by descending score, ties by ascending index
    std::vector<std::size_t> order_by_score() const;
    // 1-based rank per object under that order
    std::vector<std::size_t> ranks() const;
};

using DependencyModelSet = std::vector<Predictor>;

// Phase 1: relevant variables per target, then one dependency model per
// variable. Empty relevant sets fall back to a constant predictor holding
// the target's training median.
DependencyModelSet train(const Dataset& d, const PipelineConfig& cfg, unsigned threads = 1);

// Same, reusing relevant sets that were already selected.
DependencyModelSet train_with_relevant(const Dataset& d, const PipelineConfig& cfg,
                                       const std::vector<RelevantSet>& relevant,
                                       unsigned threads = 1);

// Phase 2a: deviations of every object on every variable, normalized per
// column by robust Z-score (median / AAD of that deviation column).
DeviationMatrix deviations(const Dataset& d, const DependencyModelSet& models,
                           unsigned threads = 1);

// The single normalization path behind deviations(): robust Z-score per
// column of a row-major n x m raw deviation matrix.
DeviationMatrix normalize_raw_deviations(std::size_t n, std::size_t m,
                                         std::vector<double> raw, unsigned threads = 1);

// Phase 2b: combination function over normalized deviations.
//   PS / RZPS: sum of normalized deviations above eta
//   Sum: plain sum; Max: maximum
//   GS: Gaussian scaling of the Sum score, max(0, erf((s - mu)/(sd sqrt 2)))
ScoreVector combine(const DeviationMatrix& dev, Combiner combiner, double eta);

// The whole pipeline: train -> deviations -> combine.
ScoreVector run(const Dataset& d, const PipelineConfig& cfg, unsigned threads = 1);

struct ExplainEntry {
    int variable = 0;
    std::string variable_name;
    double normalized_deviation = 0.0;
    double observed = 0.0;
    double expected = 0.0;
    // relevant variables of this entry's variable, with observed values,
    // strongest association first
    std::vector<std::pair<std::string, double>> relevant_observed;
};

struct ExplainReport {
    std::size_t object_index = 0;
    std::string object_id;
    std::vector<ExplainEntry> entries;  // sorted by normalized deviation, descending
};

// Top-k most deviating variables of one object, with observed vs expected
// values and the observed values of each variable's relevant variables.
ExplainReport explain(const Dataset& d, const DependencyModelSet& models,
                      const DeviationMatrix& dev, std::size_t object_index, int top_k);

std::string scores_to_csv(const ScoreVector& scores, const std::vector<std::string>& row_ids);

} // namespace depad
