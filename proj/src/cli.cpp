#include "lomboost/cli.hpp"

#include "lomboost/bounds.hpp"
#include "lomboost/criteria.hpp"
#include "lomboost/data.hpp"
#include "lomboost/learner.hpp"
#include "lomboost/report.hpp"
#include "lomboost/tree_io.hpp"
#include "lomboost/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lomboost::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kTreeFile = "tree";
constexpr const char* kTraceFile = "trace.csv";
constexpr const char* kManifestFile = "manifest";

/// Raised for problems that are the caller's command line rather than data.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    const char* env = std::getenv("LOMBOOST_SEED");
    if (env == nullptr || *env == '\0') return 1;
    std::uint64_t seed = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, seed);
    if (ec != std::errc() || ptr != end) {
        throw UsageError(std::string("LOMBOOST_SEED is not an unsigned integer: ") + env);
    }
    return seed;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct TrainOptions {
    std::string data;
    std::string out;
    TrainConfig config;
    bool lr_sweep = false;
    std::optional<int> num_classes;
};

json config_json(const TrainOptions& o) {
    json j;
    j["splits"] = o.config.max_splits;
    j["epochs"] = o.config.epochs_per_split;
    j["lr"] = o.config.learning_rate;
    j["lr_sweep"] = o.lr_sweep;
    j["C"] = o.config.criterion_c;
    j["min_node_examples"] = o.config.min_node_examples;
    j["k"] = o.num_classes ? json(*o.num_classes) : json(nullptr);
    return j;
}

TrainOptions options_from_manifest(const json& m) {
    const auto& c = m.at("config");
    TrainOptions o;
    o.data = m.at("dataset").at("path").get<std::string>();
    o.config.max_splits = c.at("splits").get<std::size_t>();
    o.config.epochs_per_split = c.at("epochs").get<int>();
    o.config.learning_rate = c.at("lr").get<double>();
    o.config.criterion_c = c.at("C").get<double>();
    o.config.min_node_examples = c.at("min_node_examples").get<std::size_t>();
    o.config.seed = m.at("seed").get<std::uint64_t>();
    o.lr_sweep = c.at("lr_sweep").get<bool>();
    if (!c.at("k").is_null()) o.num_classes = c.at("k").get<int>();
    return o;
}

int train_command(const TrainOptions& opts, const std::vector<std::string>& argv,
                  std::optional<std::uint64_t> expected_fingerprint, std::ostream& out,
                  std::ostream& err) {
    const Dataset data = parse_sparse_file(opts.data, opts.num_classes);
    const std::uint64_t fp = fingerprint(data);
    if (expected_fingerprint && *expected_fingerprint != fp) {
        err << "error: dataset " << opts.data << " has fingerprint " << hex64(fp)
            << ", manifest expects " << hex64(*expected_fingerprint) << "\n";
        return kExitFailure;
    }

    TrainConfig config = opts.config;
    config.validate();
    const auto parts = split_dataset(data, SplitSpec{0.9, 0.1, config.seed});

    json sweep = json::array();
    if (opts.lr_sweep) {
        const auto selection =
            select_learning_rate(parts.train, parts.valid, config, kLearningRateGrid);
        for (const auto& trial : selection.trials) {
            sweep.push_back({{"lr", trial.learning_rate}, {"valid_error", trial.valid_error}});
        }
        config.learning_rate = selection.best_learning_rate;
    }

    const TrainResult result = train(parts.train, config, parts.test);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    const double test_error = result.trace.back().test_error.value_or(0.0);

    const fs::path dir(opts.out);
    fs::create_directories(dir);
    std::ostringstream tree_text;
    save_tree(tree_text, result.tree);
    write_file_atomic(dir / kTreeFile, tree_text.str());
    write_file_atomic(dir / kTraceFile, trace_csv(result.trace));

    json manifest;
    manifest["command"] = "train";
    manifest["argv"] = argv;
    manifest["config"] = config_json(opts);
    manifest["seed"] = config.seed;
    manifest["dataset"] = {{"path", fs::absolute(opts.data).lexically_normal().string()},
                           {"size", data.size()},
                           {"k", data.num_classes},
                           {"d", data.num_features},
                           {"fnv1a64", hex64(fp)}};
    manifest["artifacts"] = {{"tree", kTreeFile}, {"trace", kTraceFile}};
    manifest["results"] = {{"learning_rate", config.learning_rate},
                           {"splits", result.tree.num_internal()},
                           {"train_size", parts.train.size()},
                           {"valid_size", parts.valid.size()},
                           {"test_size", parts.test.size()},
                           {"test_error", test_error},
                           {"lr_sweep", sweep}};
    write_file_atomic(dir / kManifestFile, manifest.dump(2) + "\n");

    out << "test error: " << format_decimal(test_error) << "\n";
    return kExitOk;
}

std::string budget_text(const SplitBudget& b) {
    switch (b.outcome) {
    case SplitBudget::Outcome::Finite: return std::to_string(b.splits);
    case SplitBudget::Outcome::Astronomical:
        return "astronomical: log2(t) = " + format_decimal(b.log2_splits);
    case SplitBudget::Outcome::Infinite: return "infinite";
    }
    return "";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Top-down multiclass tree learner with boosting-bound tools", "lomboost"};
    app.require_subcommand(1);

    // train
    TrainOptions train_opts;
    std::string seed_text;
    auto* train = app.add_subcommand("train", "Train a tree and write tree, trace and manifest");
    train->add_option("--data", train_opts.data, "Sparse data file")->required();
    train->add_option("--out", train_opts.out, "Output directory")->required();
    train->add_option("--splits", train_opts.config.max_splits, "Number of splits")
        ->capture_default_str();
    train->add_option("--lr", train_opts.config.learning_rate, "Router learning rate")
        ->capture_default_str();
    train->add_flag("--lr-sweep", train_opts.lr_sweep,
                    "Pick the learning rate from {0.25,0.5,0.75,1,2,4,8} on validation error");
    train->add_option("--epochs", train_opts.config.epochs_per_split, "Passes per split")
        ->capture_default_str();
    train->add_option("--seed", seed_text, "Seed (default: $LOMBOOST_SEED or 1)");
    train->add_option("--C", train_opts.config.criterion_c, "Modified Gini constant (> 2)")
        ->capture_default_str();
    train->add_option("--k", train_opts.num_classes, "Number of classes (default: largest label)");
    train->add_option("--min-node-examples", train_opts.config.min_node_examples,
                      "Smallest leaf that may be split")
        ->capture_default_str();

    // evaluate
    std::string tree_path, eval_data;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Error of a saved tree on a data file");
    evaluate_cmd->add_option("--tree", tree_path, "Tree file")->required();
    evaluate_cmd->add_option("--data", eval_data, "Sparse data file")->required();

    // curves
    std::string trace_path, curves_out;
    auto* curves = app.add_subcommand("curves", "Normalized criterion and error curves");
    curves->add_option("--trace", trace_path, "Trace CSV written by train")->required();
    curves->add_option("--out", curves_out, "Output CSV (default: stdout)");

    // bounds
    std::string criterion_name = "all";
    long bound_k = 0;
    double gamma = 0.0, alpha = 0.0, bound_c = CriterionKind::kDefaultModifiedGiniC;
    auto* bounds = app.add_subcommand("bounds", "Splits sufficient to reach a criterion value");
    bounds->add_option("--criterion", criterion_name, "entropy|gini|mgini|all")
        ->check(CLI::IsMember({"entropy", "gini", "mgini", "all"}))
        ->capture_default_str();
    bounds->add_option("--k", bound_k, "Number of classes")->required();
    bounds->add_option("--gamma", gamma, "Weak-learning advantage in (0, 0.5]")->required();
    bounds->add_option("--alpha", alpha, "Target criterion value")->required();
    bounds->add_option("--C", bound_c, "Modified Gini constant (> 2)")->capture_default_str();

    // verify
    VerifyOptions verify_opts;
    std::string fault = "none";
    auto* verify = app.add_subcommand("verify", "Randomized checks of the split and bound inequalities");
    verify->add_option("--trials", verify_opts.trials, "Trials per property")->capture_default_str();
    verify->add_option("--seed", verify_opts.seed, "Seed")->capture_default_str();
    verify->add_option("--inject-fault", fault)
        ->check(CLI::IsMember({"none", "modulus"}))
        ->group("");

    // synth
    int synth_k = 32;
    FeatureIndex synth_d = 64;
    std::size_t synth_n = 6400;
    double synth_noise = 0.05;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic k-class sparse data file");
    synth->add_option("--k", synth_k, "Number of classes")->capture_default_str();
    synth->add_option("--d", synth_d, "Number of features (>= k)")->capture_default_str();
    synth->add_option("--n", synth_n, "Number of examples")->capture_default_str();
    synth->add_option("--noise", synth_noise, "Gaussian noise scale")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output file")->required();

    // replay
    std::string manifest_path, replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a training run from its manifest");
    replay->add_option("--manifest", manifest_path, "Manifest written by train")->required();
    replay->add_option("--out", replay_out, "Output directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const auto subs = app.get_subcommands();
        err << "error: " << e.what() << "\n"
            << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        if (train->parsed()) {
            train_opts.config.seed = seed_text.empty() ? default_seed() : [&] {
                std::uint64_t s = 0;
                const char* end = seed_text.data() + seed_text.size();
                const auto [ptr, ec] = std::from_chars(seed_text.data(), end, s);
                if (ec != std::errc() || ptr != end) throw UsageError("--seed: not an unsigned integer");
                return s;
            }();
            std::vector<std::string> argv{"train"};
            argv.insert(argv.end(), args.begin() + 1, args.end());
            return train_command(train_opts, argv, std::nullopt, out, err);
        }
        if (evaluate_cmd->parsed()) {
            const Tree tree = load_tree_file(tree_path);
            const Dataset data = parse_sparse_file(eval_data, tree.num_classes());
            out << "error: " << format_decimal(evaluate(tree, data)) << "\n";
            return kExitOk;
        }
        if (curves->parsed()) {
            if (!fs::exists(trace_path)) {
                err << "error: trace file not found: " << trace_path << "\n";
                return kExitFailure;
            }
            const std::string csv = curves_csv(read_trace_csv(trace_path));
            if (curves_out.empty()) {
                out << csv;
            } else {
                write_file_atomic(curves_out, csv);
            }
            return kExitOk;
        }
        if (bounds->parsed()) {
            if (bound_k < 2) throw std::invalid_argument("--k must be at least 2");
            if (!(gamma > 0.0 && gamma <= 0.5)) {
                throw std::invalid_argument("--gamma must lie in (0, 0.5], got " + format_decimal(gamma));
            }
            std::vector<CriterionKind> kinds;
            if (criterion_name == "all") {
                kinds = {CriterionKind::shannon(), CriterionKind::gini(),
                         CriterionKind::modified_gini(bound_c)};
            } else {
                kinds = {parse_criterion(criterion_name, bound_c)};
            }
            int status = kExitOk;
            for (const auto& kind : kinds) {
                const std::string prefix = kinds.size() > 1 ? kind.name() + ": " : "";
                const Interval range = admissible_alpha(kind, bound_k);
                if (!range.contains(alpha)) {
                    err << "error: " << prefix << "--alpha " << format_decimal(alpha)
                        << " outside the admissible interval [" << format_decimal(range.lo) << ", "
                        << format_decimal(range.hi) << "]\n";
                    status = kExitFailure;
                    continue;
                }
                out << prefix << budget_text(splits_required({kind, bound_k, gamma, alpha})) << "\n";
            }
            return status;
        }
        if (verify->parsed()) {
            if (fault == "modulus") verify_opts.fault = InjectedFault::Modulus;
            const auto results = run_verification(verify_opts);
            print_verification(out, results);
            for (const auto& r : results) {
                if (!r.passed) return kExitFailure;
            }
            return kExitOk;
        }
        if (synth->parsed()) {
            write_sparse_file(synth_out,
                              synthetic_hierarchical(synth_k, synth_d, synth_n, synth_noise, synth_seed));
            return kExitOk;
        }
        if (replay->parsed()) {
            std::ifstream in(manifest_path);
            if (!in) {
                err << "error: cannot open manifest " << manifest_path << "\n";
                return kExitFailure;
            }
            const json manifest = json::parse(in);
            TrainOptions opts = options_from_manifest(manifest);
            opts.out = replay_out;
            const auto expected = std::stoull(
                manifest.at("dataset").at("fnv1a64").get<std::string>(), nullptr, 16);
            return train_command(opts, manifest.at("argv").get<std::vector<std::string>>(),
                                 expected, out, err);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        err << "error: malformed manifest: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace lomboost::cli
