// depad: dependency-based anomaly detection over CSV datasets.
//
// Subcommands: detect (score a dataset), explain (inspect one object from a
// prior run), bench (repeated-contamination evaluation against baselines),
// selftest (embedded acceptance suite).

#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "depad/engine.hpp"
#include "depad/evaluation.hpp"
#include "depad/io.hpp"
#include "depad/selftest.hpp"
#include "depad/serialize.hpp"
#include "depad/version.hpp"

namespace fs = std::filesystem;
using namespace depad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIngest = 3;
constexpr int kExitSingleClass = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonArgs {
    std::string data_path;
    std::string fs = "fbed";
    std::string model = "cart";
    std::string score = "ps";
    double eta = 0.0;
    double alpha = 0.01;
    double slope_threshold = 0.8;
    int mi_bins = 0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    int n_trees = 25;
    int min_split = 20;
    int min_bucket = 7;
    double cp = 0.003;
    int cv_folds = 10;
    std::string label_col;
    std::vector<std::string> normal_labels;
    std::string id_col;
    std::string delimiter = ",";
    bool standard_ap = false;
    std::string config_path;
    CLI::App* cmd = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_data) {
    args.cmd = cmd;
    auto* data = cmd->add_option("--data", args.data_path, "input CSV (header row required)");
    if (needs_data) data->required();
    cmd->add_option("--fs", args.fs, "relevant-variable selector: fbed|iamb|mi|dc")
        ->check(CLI::IsMember({"fbed", "iamb", "mi", "dc"}));
    cmd->add_option("--model", args.model, "dependency model: cart|mcart|ols|ridge|lasso")
        ->check(CLI::IsMember({"cart", "mcart", "ols", "ridge", "lasso"}));
    cmd->add_option("--score", args.score, "score combination: rzps|ps|sum|max|gs")
        ->check(CLI::IsMember({"rzps", "ps", "sum", "max", "gs"}));
    cmd->add_option("--eta", args.eta, "pruning threshold for ps/rzps (default 0)");
    cmd->add_option("--alpha", args.alpha, "CI-test significance level (default 0.01)");
    cmd->add_option("--slope-threshold", args.slope_threshold,
                    "filter selectors keep score >= t * max score (default 0.8)");
    cmd->add_option("--bins", args.mi_bins, "MI bins (default: ceil(sqrt(n)))");
    cmd->add_option("--seed", args.seed, "master RNG seed (falls back to DEPAD_SEED)");
    cmd->add_option("--threads", args.threads, "worker thread cap (results are thread-count invariant)");
    cmd->add_option("--trees", args.n_trees, "trees per bagged ensemble (default 25)");
    cmd->add_option("--min-split", args.min_split, "smallest splittable node (default 20)");
    cmd->add_option("--min-bucket", args.min_bucket, "smallest leaf (default 7)");
    cmd->add_option("--cp", args.cp, "tree complexity parameter (default 0.003)");
    cmd->add_option("--cv-folds", args.cv_folds, "folds for ridge/lasso lambda selection");
    cmd->add_option("--label-col", args.label_col,
                    "column holding class labels (removed from features)");
    cmd->add_option("--normal-labels", args.normal_labels,
                    "label values of the normal class (default: majority value)")
        ->delimiter(',');
    cmd->add_option("--id-col", args.id_col, "column holding object ids (removed from features)");
    cmd->add_option("--delimiter", args.delimiter, "field delimiter (default ,)");
    cmd->add_flag("--standard-ap", args.standard_ap,
                  "report conventional precision@l AP instead of the recall-style variant");
    cmd->add_option("--config", args.config_path,
                    "key=value config file; flags take precedence over its entries");
}

// Precedence: explicit flags, then config file entries, then DEPAD_SEED,
// then built-in defaults.
void resolve_config(CommonArgs& args) {
    auto flag_given = [&](const std::string& name) { return args.cmd->count(name) > 0; };

    if (!args.config_path.empty()) {
        const std::string text = read_file(args.config_path);
        std::size_t pos = 0;
        int line_no = 0;
        while (pos < text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            std::string line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            line = trim(line);
            if (line.empty() || line.front() == '[') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw UsageError(args.config_path + ":" + std::to_string(line_no) +
                                 ": expected key=value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (flag_given("--" + key)) continue;  // flag wins

            if (key == "fs") args.fs = value;
            else if (key == "model") args.model = value;
            else if (key == "score") args.score = value;
            else if (key == "eta") args.eta = std::stod(value);
            else if (key == "alpha") args.alpha = std::stod(value);
            else if (key == "slope-threshold") args.slope_threshold = std::stod(value);
            else if (key == "bins") args.mi_bins = std::stoi(value);
            else if (key == "seed") args.seed = std::stoull(value);
            else if (key == "threads") args.threads = static_cast<unsigned>(std::stoul(value));
            else if (key == "trees") args.n_trees = std::stoi(value);
            else if (key == "min-split") args.min_split = std::stoi(value);
            else if (key == "min-bucket") args.min_bucket = std::stoi(value);
            else if (key == "cp") args.cp = std::stod(value);
            else if (key == "cv-folds") args.cv_folds = std::stoi(value);
            else if (key == "label-col") args.label_col = value;
            else if (key == "id-col") args.id_col = value;
            else if (key == "delimiter") args.delimiter = value;
            else if (key == "standard-ap") args.standard_ap = (value == "1" || value == "true");
            else if (key == "normal-labels") {
                args.normal_labels.clear();
                std::size_t p2 = 0;
                while (p2 <= value.size()) {
                    const auto comma = value.find(',', p2);
                    if (comma == std::string::npos) {
                        if (p2 < value.size()) args.normal_labels.push_back(value.substr(p2));
                        break;
                    }
                    args.normal_labels.push_back(value.substr(p2, comma - p2));
                    p2 = comma + 1;
                }
            } else {
                throw UsageError(args.config_path + ": unknown config key '" + key + "'");
            }
        }
    }

    if (!flag_given("--seed") && args.seed == 0) {
        if (const char* env = std::getenv("DEPAD_SEED")) args.seed = std::stoull(env);
    }

    const auto fs = selector_from_name(args.fs);
    const auto mk = model_kind_from_name(args.model);
    const auto cb = combiner_from_name(args.score);
    if (!fs || !mk || !cb)
        throw UsageError("unknown fs/model/score value in config file");
}

IngestOptions ingest_options(const CommonArgs& args) {
    IngestOptions opts;
    if (!args.label_col.empty()) opts.label_column = args.label_col;
    opts.normal_labels = args.normal_labels;
    if (!args.id_col.empty()) opts.id_column = args.id_col;
    if (!args.delimiter.empty()) opts.delimiter = args.delimiter[0];
    return opts;
}

PipelineConfig pipeline_config(const CommonArgs& args) {
    PipelineConfig cfg;
    cfg.selector.method = *selector_from_name(args.fs);
    cfg.selector.alpha = args.alpha;
    cfg.selector.slope_threshold = args.slope_threshold;
    cfg.selector.mi_bins = args.mi_bins;
    cfg.model_kind = *model_kind_from_name(args.model);
    cfg.combiner = *combiner_from_name(args.score);
    cfg.eta = args.eta;
    cfg.seed = args.seed;
    cfg.n_trees = args.n_trees;
    cfg.tree.min_split = args.min_split;
    cfg.tree.min_bucket = args.min_bucket;
    cfg.tree.cp = args.cp;
    cfg.cv_folds = args.cv_folds;
    return cfg;
}

Dataset load_dataset(const CommonArgs& args, IngestReport* report) {
    const Dataset d = ingest_csv(args.data_path, ingest_options(args), report);
    if (report) {
        for (const auto& w : report->warnings) std::cerr << "warning: " << w << "\n";
    }
    return d;
}

void print_top_table(const Dataset& d, const DependencyModelSet& models,
                     const DeviationMatrix& dev, const ScoreVector& scores, int top_k) {
    const auto order = scores.order_by_score();
    const std::size_t k = std::min<std::size_t>(order.size(), static_cast<std::size_t>(top_k));
    std::cout << "rank  object            score      top deviating variables (deviation, observed, expected)\n";
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = order[r];
        const ExplainReport rep = explain(d, models, dev, i, 3);
        char head[64];
        std::snprintf(head, sizeof head, "%-5zu %-16s %9.3f  ", r + 1,
                      d.row_ids()[i].c_str(), scores.scores[i]);
        std::cout << head;
        for (std::size_t e = 0; e < rep.entries.size(); ++e) {
            const auto& entry = rep.entries[e];
            if (e) std::cout << "; ";
            char cell[128];
            std::snprintf(cell, sizeof cell, "%s (%.2f, %.4g, %.4g)",
                          entry.variable_name.c_str(), entry.normalized_deviation,
                          entry.observed, entry.expected);
            std::cout << cell;
        }
        std::cout << "\n";
    }
}

int cmd_detect(const CommonArgs& args, const std::string& out_dir, int top_k,
               const std::string& train_data) {
    IngestReport report;
    const Dataset d = load_dataset(args, &report);

    // optional train/score split: models come from --train-data, scores from --data
    std::optional<Dataset> train_set;
    if (!train_data.empty()) {
        CommonArgs targs = args;
        targs.data_path = train_data;
        train_set = load_dataset(targs, nullptr);
        if (train_set->var_names() != d.var_names())
            throw IngestError("--train-data schema does not match --data");
    }

    const PipelineConfig cfg = pipeline_config(args);

    RunManifest manifest;
    manifest.config = cfg;
    manifest.dataset_path = args.data_path;
    manifest.n = d.n_rows();
    manifest.m = d.n_vars();
    manifest.seed = cfg.seed;
    manifest.threads = args.threads;
    manifest.tool_version = kVersion;

    const Dataset& fit_on = train_set ? *train_set : d;
    auto t0 = std::chrono::steady_clock::now();
    const auto relevant = select_all(fit_on, cfg.selector, args.threads);
    auto t1 = std::chrono::steady_clock::now();

    const DependencyModelSet models = train_with_relevant(fit_on, cfg, relevant, args.threads);
    auto t2 = std::chrono::steady_clock::now();
    const DeviationMatrix dev = deviations(d, models, args.threads);
    const ScoreVector scores = combine(dev, cfg.combiner, cfg.eta);
    auto t3 = std::chrono::steady_clock::now();

    manifest.timings.select_seconds = std::chrono::duration<double>(t1 - t0).count();
    manifest.timings.train_seconds = std::chrono::duration<double>(t2 - t1).count();
    manifest.timings.score_seconds = std::chrono::duration<double>(t3 - t2).count();
    double member_sum = 0.0;
    for (const auto& r : relevant) member_sum += static_cast<double>(r.members.size());
    manifest.lambda_bar = member_sum / static_cast<double>(relevant.size());

    const fs::path out = out_dir.empty() ? fs::path("depad_out") : fs::path(out_dir);
    atomic_write_file(out / "scores.csv", scores_to_csv(scores, d.row_ids()));
    atomic_write_file(out / "manifest.json", manifest_to_json(manifest));
    atomic_write_file(out / "models.json", models_to_json(models, fit_on, cfg));
    atomic_write_file(out / "relevant_sets.json", relevant_sets_to_json(relevant, fit_on));
    if (!d.encoding().columns.empty())
        atomic_write_file(out / "encoding.json", encoding_map_to_json(d.encoding()));

    if (d.has_labels()) {
        const std::size_t anomalies = d.count_labeled(Label::Anomaly);
        const std::size_t normals = d.count_labeled(Label::Normal);
        if (anomalies == 0 || normals == 0) {
            std::cerr << "error: labels present but only one class; metrics impossible\n";
            return kExitSingleClass;
        }
        const double auc = roc_auc(scores.scores, d.labels());
        const double ap_paper = average_precision(scores.scores, d.labels(), true);
        const double ap_std = average_precision(scores.scores, d.labels(), false);
        atomic_write_file(out / "metrics.json",
                          metrics_to_json(auc, ap_paper, ap_std, anomalies, normals));
        std::cout << cfg.instantiation_name() << ": ROC AUC " << format_double(auc) << ", AP "
                  << format_double(args.standard_ap ? ap_std : ap_paper) << "\n";
    }

    print_top_table(d, models, dev, scores, top_k);
    std::cout << "artifacts written to " << out.string() << "\n";
    return kExitOk;
}

int cmd_explain(const CommonArgs& args, const std::string& run_dir,
                const std::string& object, int vars, const std::string& out_path) {
    const Dataset d = load_dataset(args, nullptr);
    const fs::path run(run_dir);
    const DependencyModelSet models = models_from_json(read_file(run / "models.json"), d);
    const DeviationMatrix dev = deviations(d, models, args.threads);
    const ScoreVector scores = combine(dev, pipeline_config(args).combiner, args.eta);

    // resolve id first, then fall back to a 1-based rank
    std::ptrdiff_t index = -1;
    for (std::size_t i = 0; i < d.row_ids().size(); ++i) {
        if (d.row_ids()[i] == object) {
            index = static_cast<std::ptrdiff_t>(i);
            break;
        }
    }
    if (index < 0) {
        try {
            const std::size_t rank = std::stoull(object);
            const auto order = scores.order_by_score();
            if (rank >= 1 && rank <= order.size())
                index = static_cast<std::ptrdiff_t>(order[rank - 1]);
        } catch (...) {
        }
    }
    if (index < 0) {
        std::cerr << "error: unknown object '" << object << "' (no id match, not a valid rank)\n";
        return kExitUsage;
    }

    const ExplainReport report =
        explain(d, models, dev, static_cast<std::size_t>(index), vars);
    std::cout << explain_report_to_text(report);
    if (!out_path.empty()) atomic_write_file(out_path, explain_report_to_json(report));
    return kExitOk;
}

int cmd_bench(const CommonArgs& args, const std::vector<std::string>& method_tokens,
              int repeats, double fraction, const std::string& out_dir) {
    const Dataset d = load_dataset(args, nullptr);
    if (!d.has_labels()) {
        std::cerr << "error: bench needs a labeled dataset (--label-col)\n";
        return kExitSingleClass;
    }
    if (d.count_labeled(Label::Anomaly) == 0 || d.count_labeled(Label::Normal) == 0) {
        std::cerr << "error: bench needs both classes present\n";
        return kExitSingleClass;
    }

    const PipelineConfig defaults = pipeline_config(args);
    std::vector<NamedMethod> methods;
    for (const auto& token : method_tokens) {
        const auto parsed = parse_method(token, defaults);
        if (!parsed) {
            std::cerr << "error: unknown method '" << token << "'\n";
            return kExitUsage;
        }
        methods.push_back(*parsed);
    }

    BenchmarkSpec spec;
    spec.repeats = repeats;
    spec.anomaly_fraction = fraction;
    spec.rng_seed = args.seed;
    const auto reports = run_benchmark(d, methods, spec, args.threads, !args.standard_ap);
    const auto p_auc = pairwise_rank_sum(reports, true);
    const auto p_ap = pairwise_rank_sum(reports, false);

    const fs::path out = out_dir.empty() ? fs::path("depad_bench") : fs::path(out_dir);
    atomic_write_file(out / "report.json", evaluation_reports_to_json(reports, spec));
    atomic_write_file(out / "report.csv", evaluation_reports_to_csv(reports));
    atomic_write_file(out / "ranksum_auc.csv", rank_sum_matrix_to_csv(reports, p_auc));
    atomic_write_file(out / "ranksum_ap.csv", rank_sum_matrix_to_csv(reports, p_ap));

    std::cout << "method                     trials  mean AUC   sd      mean AP    sd\n";
    for (const auto& r : reports) {
        if (!r.error.empty()) {
            std::cout << r.method << ": failed (" << r.error << ")\n";
            continue;
        }
        char line[160];
        std::snprintf(line, sizeof line, "%-26s %5zu  %8.4f %7.4f  %8.4f %7.4f\n",
                      r.method.c_str(), r.trials.size(), r.mean_auc(), r.sd_auc(),
                      r.mean_ap(), r.sd_ap());
        std::cout << line;
    }
    std::cout << "reports written to " << out.string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dependency-based anomaly detection"};
    app.set_version_flag("--version", std::string("depad ") + kVersion);
    app.require_subcommand(1);

    CommonArgs detect_args, explain_args, bench_args;
    std::string out_dir, run_dir, object, explain_out, train_data;
    int top_k = 10, vars = 3, repeats = 20;
    double fraction = 0.01;
    std::vector<std::string> method_tokens;

    auto* detect = app.add_subcommand("detect", "train dependency models and score every object");
    add_common(detect, detect_args, true);
    detect->add_option("--out", out_dir, "output directory (default depad_out)");
    detect->add_option("--top", top_k, "rows in the printed anomaly table (default 10)");
    detect->add_option("--train-data", train_data,
                       "fit models on this CSV instead of the scored one (split mode)");

    auto* explain_cmd = app.add_subcommand("explain", "explain one object from a prior detect run");
    add_common(explain_cmd, explain_args, true);
    explain_cmd->add_option("--run", run_dir, "directory written by detect")->required();
    explain_cmd->add_option("--object", object, "object id, or 1-based rank when no id matches")
        ->required();
    explain_cmd->add_option("--vars", vars, "variables to report (default 3)");
    explain_cmd->add_option("--out", explain_out, "also write the report as JSON here");

    auto* bench = app.add_subcommand("bench", "repeated-contamination benchmark protocol");
    add_common(bench, bench_args, true);
    bench->add_option("--methods", method_tokens,
                      "comma list: fs-model-score instantiations plus wknn|lof")
        ->delimiter(',')
        ->required();
    bench->add_option("--repeats", repeats, "contaminated datasets per method (default 20)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--fraction", fraction,
                      "anomaly fraction; k = round(fraction * n) counts against the original "
                      "object total (default 0.01)");
    bench->add_option("--out", out_dir, "output directory (default depad_bench)");

    auto* selftest_cmd = app.add_subcommand("selftest", "run the embedded acceptance suite");
    bool list_only = false;
    bool inject = false;
    std::string filter;
    unsigned st_threads = 8;
    selftest_cmd->add_flag("--list", list_only, "enumerate criteria without running");
    selftest_cmd->add_option("--filter", filter, "run only criteria containing this substring");
    selftest_cmd->add_option("--threads", st_threads, "thread cap for the suite");
    selftest_cmd->add_flag("--inject-failure", inject)->group("");  // test hook, hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (detect->parsed()) {
            resolve_config(detect_args);
            return cmd_detect(detect_args, out_dir, top_k, train_data);
        }
        if (explain_cmd->parsed()) {
            resolve_config(explain_args);
            return cmd_explain(explain_args, run_dir, object, vars, explain_out);
        }
        if (bench->parsed()) {
            resolve_config(bench_args);
            return cmd_bench(bench_args, method_tokens, repeats, fraction, out_dir);
        }
        if (selftest_cmd->parsed()) {
            selftest::Options opts;
            opts.list_only = list_only;
            opts.filter = filter;
            opts.inject_failure = inject;
            opts.threads = st_threads;
            opts.cli_path = argv[0];
            return selftest::run(opts, std::cout) == 0 ? kExitOk : kExitFailure;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IngestError& e) {
        std::cerr << "ingest error: " << e.what() << "\n";
        return kExitIngest;
    } catch (const SingleClassError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSingleClass;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
