// Command-line front end over the svmtree C API.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svmtree/svmtree.h"

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kStrategies = {"ova",   "ovo",    "ddag",     "adag",
                                              "bts_g", "cbts_g", "ib_dtree", "ibge_dtree"};

struct ReportDeleter {
    void operator()(svt_report* r) const { svt_report_free(r); }
};
struct ModelDeleter {
    void operator()(svt_model* m) const { svt_model_free(m); }
};
struct DatasetDeleter {
    void operator()(svt_dataset* d) const { svt_dataset_free(d); }
};
using ReportPtr = std::unique_ptr<svt_report, ReportDeleter>;
using ModelPtr = std::unique_ptr<svt_model, ModelDeleter>;
using DatasetPtr = std::unique_ptr<svt_dataset, DatasetDeleter>;

struct CallFailed {
    int exit_code;
};

void check(svt_status status, const std::string& context) {
    if (status == SVT_OK) return;
    std::cerr << "svmtree: " << context << ": " << svt_status_name(status) << ": " << svt_last_error() << '\n';
    throw CallFailed{status == SVT_ERR_UNKNOWN_STRATEGY || status == SVT_ERR_INVALID_ARGUMENT ? 2 : 1};
}

struct RunConfig {
    std::vector<std::string> datasets;
    int label_col = -1;
    bool header = false;
    std::vector<std::string> strategies;
    std::vector<double> gammas = {0.001, 0.01, 0.1, 1, 10};
    std::vector<double> cs = {1, 10, 100, 1000};
    int folds = 10;
    int inner_folds = 3;
    std::uint64_t seed = 0;
    double frac = 0.2;
    int bts_runs = 10;
    int dag_orders = 1000;
    bool timing = false;
    std::string out;
    std::vector<std::string> formats;

    svt_options options() const {
        svt_options o;
        svt_options_default(&o);
        o.gammas = gammas.data();
        o.n_gammas = gammas.size();
        o.cs = cs.data();
        o.n_cs = cs.size();
        o.folds = folds;
        o.inner_folds = inner_folds;
        o.seed = seed;
        o.frac = frac;
        o.bts_runs = bts_runs;
        o.dag_orders = dag_orders;
        o.record_timing = timing ? 1 : 0;
        return o;
    }

    // --out wins, then SVMTREE_OUT_DIR, then the working directory.
    fs::path out_dir() const {
        if (!out.empty()) return out;
        if (const char* env = std::getenv("SVMTREE_OUT_DIR"); env && *env) return env;
        return ".";
    }
};

void add_protocol_options(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--gamma-grid", cfg.gammas, "RBF gamma values searched by inner validation")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    cmd.add_option("--c-grid", cfg.cs, "C values searched by inner validation")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    cmd.add_option("--inner-folds", cfg.inner_folds, "folds of the inner grid search")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000));
    cmd.add_option("--seed", cfg.seed, "seed for folds and random node selection")->capture_default_str();
    cmd.add_option("--frac", cfg.frac, "IBGE-DTree shortlist fraction in (0, 1]")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--bts-runs", cfg.bts_runs, "random BTS-G trees averaged per fold")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--dag-orders", cfg.dag_orders, "random class orders averaged for DDAG/ADAG")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void add_dataset_options(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--label-col", cfg.label_col, "label column index; negative counts from the end")
        ->capture_default_str();
    cmd.add_flag("--header", cfg.header, "first CSV row is a header");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "svmtree: cannot create " << dir.string() << ": " << ec.message() << '\n';
        throw CallFailed{1};
    }
}

int cmd_train(const RunConfig& cfg, const std::string& model_arg) {
    if (cfg.strategies.size() != 1) {
        std::cerr << "svmtree: train takes exactly one --strategy\n";
        return 2;
    }
    const auto& strategy = cfg.strategies.front();
    svt_dataset* raw = nullptr;
    check(svt_dataset_load_csv(cfg.datasets.front().c_str(), cfg.label_col, cfg.header, &raw), "loading dataset");
    DatasetPtr ds(raw);

    const auto opts = cfg.options();
    svt_model* model_raw = nullptr;
    check(svt_model_train(ds.get(), strategy.c_str(), &opts, &model_raw), "training " + strategy);
    ModelPtr model(model_raw);

    fs::path model_path = model_arg.empty() ? cfg.out_dir() / "model.json" : fs::path(model_arg);
    if (model_path.has_parent_path()) ensure_dir(model_path.parent_path());
    check(svt_model_save(model.get(), model_path.string().c_str()), "saving model");

    const char* names[] = {strategy.c_str()};
    svt_report* rep_raw = nullptr;
    check(svt_report_create(&opts, names, 1, &rep_raw), "creating manifest");
    ReportPtr manifest(rep_raw);
    check(svt_report_declare_dataset(manifest.get(), cfg.datasets.front().c_str(), cfg.label_col, cfg.header),
          "describing dataset");
    const auto manifest_path = model_path.string() + ".manifest.json";
    check(svt_report_write(manifest.get(), "manifest", manifest_path.c_str()), "writing manifest");

    std::cout << "model: " << model_path.string() << '\n'
              << "strategy: " << svt_model_strategy(model.get()) << '\n'
              << "classes: " << svt_model_num_classes(model.get()) << '\n'
              << "gamma: " << svt_model_gamma(model.get()) << '\n'
              << "C: " << svt_model_c(model.get()) << '\n';
    if (const auto nodes = svt_model_internal_nodes(model.get()); nodes > 0)
        std::cout << "internal nodes: " << nodes << '\n';
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input, bool header, bool has_label, int label_col,
                const std::string& output) {
    svt_model* raw = nullptr;
    check(svt_model_load(model_path.c_str(), &raw), "loading model");
    ModelPtr model(raw);
    check(svt_model_predict_csv(model.get(), input.c_str(), header, has_label, label_col,
                                output.empty() ? nullptr : output.c_str()),
          "predicting " + input);
    return 0;
}

int write_reports(const svt_report* report, const RunConfig& cfg, bool with_manifest) {
    const auto dir = cfg.out_dir();
    ensure_dir(dir);
    std::vector<std::string> formats = cfg.formats;
    if (formats.empty()) formats = {"text", "csv", "json"};
    for (const auto& f : formats) {
        const std::string ext = f == "text" ? "txt" : f;
        const auto path = (dir / ("report." + ext)).string();
        check(svt_report_write(report, f.c_str(), path.c_str()), "writing " + path);
        std::cout << "wrote " << path << '\n';
    }
    if (with_manifest) {
        const auto path = (dir / "manifest.json").string();
        check(svt_report_write(report, "manifest", path.c_str()), "writing " + path);
        std::cout << "wrote " << path << '\n';
    }
    const auto failed = svt_report_failed_cells(report);
    if (failed > 0) {
        std::cerr << "svmtree: " << failed << " of " << svt_report_cell_count(report) << " cells did not complete\n";
        return 1;
    }
    return 0;
}

int cmd_benchmark(const RunConfig& cfg, const std::string& manifest) {
    svt_report* raw = nullptr;
    if (!manifest.empty()) {
        check(svt_report_run_manifest(manifest.c_str(), &raw), "running manifest " + manifest);
        ReportPtr report(raw);
        return write_reports(report.get(), cfg, true);
    }
    if (cfg.datasets.empty()) {
        std::cerr << "svmtree: benchmark needs --dataset or --manifest\n";
        return 2;
    }
    const auto strategies = cfg.strategies.empty() ? kStrategies : cfg.strategies;
    std::vector<const char*> names;
    for (const auto& s : strategies) names.push_back(s.c_str());
    const auto opts = cfg.options();
    check(svt_report_create(&opts, names.data(), names.size(), &raw), "creating report");
    ReportPtr report(raw);
    for (const auto& path : cfg.datasets) {
        std::cerr << "evaluating " << path << '\n';
        check(svt_report_add_dataset(report.get(), path.c_str(), cfg.label_col, cfg.header), "evaluating " + path);
    }
    return write_reports(report.get(), cfg, true);
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& format, const std::string& output) {
    svt_report* raw = nullptr;
    check(svt_report_load_json(inputs.front().c_str(), &raw), "loading " + inputs.front());
    ReportPtr merged(raw);
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        svt_report* other = nullptr;
        check(svt_report_load_json(inputs[i].c_str(), &other), "loading " + inputs[i]);
        ReportPtr holder(other);
        check(svt_report_merge(merged.get(), holder.get()), "merging " + inputs[i]);
    }
    check(svt_report_write(merged.get(), format.c_str(), output.empty() ? nullptr : output.c_str()),
          "writing comparison");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-class SVM reductions: decision trees, DAGs, OVO and OVA"};
    app.require_subcommand(1);
    app.set_version_flag("--version", svt_version());

    RunConfig cfg;

    auto* train = app.add_subcommand("train", "train one strategy on a whole dataset");
    std::string model_out;
    std::string train_dataset;
    std::string train_strategy;
    train->add_option("--dataset", train_dataset, "training CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--strategy", train_strategy, "reduction to train")
        ->required()
        ->check(CLI::IsMember(kStrategies));
    train->add_option("--model", model_out, "model file (default <out>/model.json)");
    train->add_option("--out", cfg.out, "output directory");
    add_dataset_options(*train, cfg);
    add_protocol_options(*train, cfg);

    auto* predict = app.add_subcommand("predict", "classify the rows of a CSV file");
    std::string predict_model;
    std::string predict_input;
    std::string predict_output;
    int predict_label = 0;
    bool predict_header = false;
    predict->add_option("--model", predict_model, "model file")->required()->check(CLI::ExistingFile);
    predict->add_option("--input", predict_input, "CSV of feature rows")->required()->check(CLI::ExistingFile);
    auto* label_opt =
        predict->add_option("--label-col", predict_label, "drop this column (e.g. a label) before classifying");
    predict->add_flag("--header", predict_header, "first CSV row is a header");
    predict->add_option("--output", predict_output, "predictions CSV (default stdout)");

    auto* bench = app.add_subcommand("benchmark", "cross-validate strategies over datasets");
    std::string manifest;
    bench->add_option("--dataset", cfg.datasets, "dataset CSV (repeatable)")->check(CLI::ExistingFile);
    bench->add_option("--strategy", cfg.strategies, "strategy (repeatable, default all)")
        ->check(CLI::IsMember(kStrategies));
    bench->add_option("--folds", cfg.folds, "outer cross-validation folds")
        ->capture_default_str()
        ->check(CLI::Range(2, 100000));
    bench->add_option("--out", cfg.out, "output directory (default $SVMTREE_OUT_DIR or .)");
    bench->add_option("--format", cfg.formats, "report format: text, csv, json (repeatable, default all)")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    bench->add_flag("--timing", cfg.timing, "record wall-clock times in reports");
    auto* manifest_opt =
        bench->add_option("--manifest", manifest, "rerun the benchmark described by a manifest")
            ->check(CLI::ExistingFile);
    add_dataset_options(*bench, cfg);
    add_protocol_options(*bench, cfg);
    manifest_opt->excludes("--dataset")->excludes("--strategy");

    auto* compare = app.add_subcommand("compare", "merge JSON reports and print tables with pairwise tests");
    std::vector<std::string> compare_inputs;
    std::string compare_format = "text";
    std::string compare_output;
    compare->add_option("--report", compare_inputs, "JSON report (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--format", compare_format, "output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "csv", "json"}));
    compare->add_option("--output", compare_output, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            cfg.datasets = {train_dataset};
            cfg.strategies = {train_strategy};
            return cmd_train(cfg, model_out);
        }
        if (*predict)
            return cmd_predict(predict_model, predict_input, predict_header, label_opt->count() > 0, predict_label,
                               predict_output);
        if (*bench) return cmd_benchmark(cfg, manifest);
        if (*compare) return cmd_compare(compare_inputs, compare_format, compare_output);
    } catch (const CallFailed& e) {
        return e.exit_code;
    }
    return 0;
}
