#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depad/dataset.hpp"
#include "depad/stats.hpp"

namespace depad {

enum class SelectorMethod { FBED, IAMB, MI, DC };

const char* selector_name(SelectorMethod m);
std::optional<SelectorMethod> selector_from_name(const std::string& name);

struct SelectorConfig {
    SelectorMethod method = SelectorMethod::FBED;
    double alpha = 0.01;           // CI-test significance level
    double slope_threshold = 0.8;  // filter methods: keep score >= t * max
    std::optional<int> max_set_size;  // default min(m-1, n/10)
    int mi_bins = 0;               // 0 = ceil(sqrt(n))

    int effective_max_set_size(std::size_t n, std::size_t m) const;
    int effective_bins(std::size_t n) const;
};

struct RelevantSet {
    int target = 0;
    std::vector<int> members;          // selection order (CI) / index order (filter)
    SelectorMethod method = SelectorMethod::FBED;
    std::vector<double> scores;        // filter methods: aligned with members
    bool truncated = false;            // growth hit a sample-size or size cap
};

// Markov-blanket style selectors driven by Fisher's z tests.
//
// FBED: forward selection with early dropping (dropped candidates are
// retried in one additional forward run, which is what recovers spouses),
// then backward elimination of members independent given the rest.
RelevantSet select_fbed(const Dataset& d, const CorrelationCache& cache,
                        int target, const SelectorConfig& cfg);
// IAMB: grow conditioning on the whole current set, then shrink.
RelevantSet select_iamb(const Dataset& d, const CorrelationCache& cache,
                        int target, const SelectorConfig& cfg);

// MI / DC relevance filter: keeps every candidate scoring at least
// slope_threshold times the best score. Encoded siblings of the target are
// excluded so a one-hot level never predicts itself.
RelevantSet select_filter(const Dataset& d, int target, const SelectorConfig& cfg);

// Applies the configured selector to every variable. Constant-flagged
// columns yield empty sets and never appear as members. Evaluation is
// parallel over targets with results in target order.
std::vector<RelevantSet> select_all(const Dataset& d, const SelectorConfig& cfg,
                                    unsigned threads = 1);

} // namespace depad
