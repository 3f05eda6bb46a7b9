#include "depad/feature_selection.hpp"

#include <algorithm>
#include <cmath>

#include "depad/parallel.hpp"

namespace depad {

const char* selector_name(SelectorMethod m) {
    switch (m) {
        case SelectorMethod::FBED: return "FBED";
        case SelectorMethod::IAMB: return "IAMB";
        case SelectorMethod::MI: return "MI";
        case SelectorMethod::DC: return "DC";
    }
    return "?";
}

std::optional<SelectorMethod> selector_from_name(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "fbed") return SelectorMethod::FBED;
    if (s == "iamb") return SelectorMethod::IAMB;
    if (s == "mi") return SelectorMethod::MI;
    if (s == "dc") return SelectorMethod::DC;
    return std::nullopt;
}

int SelectorConfig::effective_max_set_size(std::size_t n, std::size_t m) const {
    if (max_set_size) return std::max(0, *max_set_size);
    const int cap = static_cast<int>(n / 10);
    return std::max(1, std::min(static_cast<int>(m) - 1, cap));
}

int SelectorConfig::effective_bins(std::size_t n) const {
    if (mi_bins >= 2) return mi_bins;
    return std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
}

namespace {

struct TestOutcome {
    int var = -1;
    double p = 1.0;
    double stat = 0.0;
};

// Candidates usable for a target: not the target, not constant.
std::vector<int> candidate_pool(const Dataset& d, int target) {
    std::vector<int> pool;
    for (std::size_t j = 0; j < d.n_vars(); ++j) {
        if (static_cast<int>(j) == target) continue;
        if (d.is_constant(j)) continue;
        pool.push_back(static_cast<int>(j));
    }
    return pool;
}

bool can_condition(std::size_t n, std::size_t cond_size) { return n > cond_size + 3; }

// Backward elimination: repeatedly drop any member that tests independent of
// the target given the remaining members. Deterministic: scans ascending.
void backward_phase(const CorrelationCache& cache, int target, double alpha,
                    std::vector<int>& selected) {
    bool changed = true;
    while (changed && !selected.empty()) {
        changed = false;
        for (std::size_t k = 0; k < selected.size(); ++k) {
            std::vector<int> rest;
            rest.reserve(selected.size() - 1);
            for (std::size_t t = 0; t < selected.size(); ++t)
                if (t != k) rest.push_back(selected[t]);
            if (!can_condition(cache.n_rows(), rest.size())) continue;
            const auto res = fisher_z_test(cache, target, selected[k], rest, alpha);
            if (res.independent) {
                selected.erase(selected.begin() + static_cast<std::ptrdiff_t>(k));
                changed = true;
                break;
            }
        }
    }
}

} // namespace

RelevantSet select_fbed(const Dataset& d, const CorrelationCache& cache,
                        int target, const SelectorConfig& cfg) {
    RelevantSet out;
    out.target = target;
    out.method = SelectorMethod::FBED;
    if (d.is_constant(static_cast<std::size_t>(target))) return out;

    const int cap = cfg.effective_max_set_size(d.n_rows(), d.n_vars());
    std::vector<int> selected;

    // Initial run plus one refill run over the dropped candidates.
    std::vector<int> pool = candidate_pool(d, target);
    for (int run = 0; run < 2; ++run) {
        std::vector<int> candidates;
        for (int v : pool) {
            if (std::find(selected.begin(), selected.end(), v) == selected.end())
                candidates.push_back(v);
        }
        while (!candidates.empty()) {
            if (static_cast<int>(selected.size()) >= cap ||
                !can_condition(d.n_rows(), selected.size())) {
                out.truncated = true;
                break;
            }
            TestOutcome best;
            std::vector<int> survivors;
            for (int v : candidates) {
                const auto res = fisher_z_test(cache, target, v, selected, cfg.alpha);
                if (res.independent) continue;  // early dropping
                survivors.push_back(v);
                if (res.p_value < best.p ||
                    (res.p_value == best.p && (best.var < 0 || v < best.var))) {
                    best = {v, res.p_value, res.statistic};
                }
            }
            if (best.var < 0) break;  // everything dropped
            selected.push_back(best.var);
            candidates.clear();
            for (int v : survivors)
                if (v != best.var) candidates.push_back(v);
        }
    }

    backward_phase(cache, target, cfg.alpha, selected);
    out.members = std::move(selected);
    return out;
}

RelevantSet select_iamb(const Dataset& d, const CorrelationCache& cache,
                        int target, const SelectorConfig& cfg) {
    RelevantSet out;
    out.target = target;
    out.method = SelectorMethod::IAMB;
    if (d.is_constant(static_cast<std::size_t>(target))) return out;

    const int cap = cfg.effective_max_set_size(d.n_rows(), d.n_vars());
    const std::vector<int> pool = candidate_pool(d, target);
    std::vector<int> selected;

    // grow: add the strongest dependent candidate given the whole current set
    while (true) {
        if (static_cast<int>(selected.size()) >= cap ||
            !can_condition(d.n_rows(), selected.size())) {
            out.truncated = true;
            break;
        }
        TestOutcome best;
        for (int v : pool) {
            if (std::find(selected.begin(), selected.end(), v) != selected.end()) continue;
            const auto res = fisher_z_test(cache, target, v, selected, cfg.alpha);
            if (res.independent) continue;
            if (res.p_value < best.p ||
                (res.p_value == best.p && (best.var < 0 || v < best.var))) {
                best = {v, res.p_value, res.statistic};
            }
        }
        if (best.var < 0) break;
        selected.push_back(best.var);
    }

    backward_phase(cache, target, cfg.alpha, selected);
    out.members = std::move(selected);
    return out;
}

RelevantSet select_filter(const Dataset& d, int target, const SelectorConfig& cfg) {
    RelevantSet out;
    out.target = target;
    out.method = cfg.method;
    if (d.is_constant(static_cast<std::size_t>(target))) return out;

    const int target_group = d.encoding_group(static_cast<std::size_t>(target));
    std::vector<int> candidates;
    for (int v : candidate_pool(d, target)) {
        if (target_group >= 0 && d.encoding_group(static_cast<std::size_t>(v)) == target_group)
            continue;  // sibling of the target's one-hot block
        candidates.push_back(v);
    }
    if (candidates.empty()) return out;

    std::vector<double> scores(candidates.size(), 0.0);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (cfg.method == SelectorMethod::MI) {
            scores[k] = mutual_information(d, target, candidates[k], cfg.effective_bins(d.n_rows()));
        } else {
            scores[k] = distance_correlation(d, target, candidates[k]);
        }
    }
    const double max_score = *std::max_element(scores.begin(), scores.end());
    if (max_score <= 0.0) return out;

    const double cutoff = cfg.slope_threshold * max_score;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (scores[k] >= cutoff) {
            out.members.push_back(candidates[k]);
            out.scores.push_back(scores[k]);
        }
    }
    return out;
}

std::vector<RelevantSet> select_all(const Dataset& d, const SelectorConfig& cfg,
                                    unsigned threads) {
    std::vector<RelevantSet> out(d.n_vars());
    const bool ci_based = cfg.method == SelectorMethod::FBED || cfg.method == SelectorMethod::IAMB;
    std::optional<CorrelationCache> cache;
    if (ci_based) cache.emplace(d);

    parallel_for(d.n_vars(), threads, [&](std::size_t j) {
        const int target = static_cast<int>(j);
        switch (cfg.method) {
            case SelectorMethod::FBED: out[j] = select_fbed(d, *cache, target, cfg); break;
            case SelectorMethod::IAMB: out[j] = select_iamb(d, *cache, target, cfg); break;
            case SelectorMethod::MI:
            case SelectorMethod::DC: out[j] = select_filter(d, target, cfg); break;
        }
    });
    return out;
}

} // namespace depad
