#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svmtree/dataset.hpp"
#include "svmtree/multiclass_model.hpp"

namespace svmtree {

struct HyperGrid {
    std::vector<double> gammas = {0.001, 0.01, 0.1, 1, 10};
    std::vector<double> cs = {1, 10, 100, 1000};

    void validate() const;
};

struct CvOptions {
    int folds = 10;
    int inner_folds = 3;
    std::uint64_t seed = 0;
    HyperGrid grid;
    StrategyOptions strategy;
    int bts_runs = 10;      // BTS-G trees averaged per fold
    int dag_orders = 1000;  // random class orders averaged for DDAG/ADAG
    double tolerance = 1e-3;
    int max_passes = 1000;
    bool record_timing = false;  // wall-clock columns stay 0 unless set

    void validate() const;
};

struct FoldResult {
    int fold = 0;
    bool ok = false;
    std::string error;
    std::size_t test_size = 0;
    double accuracy = 0.0;
    double mean_decisions = 0.0;
    double gamma = 0.0;
    double c_reg = 0.0;
    double train_seconds = 0.0;
    double classify_seconds = 0.0;
};

// One (dataset, method) cell of the benchmark.
struct MethodResult {
    std::string dataset;
    Strategy method = Strategy::ovo;
    int num_classes = 0;
    std::vector<FoldResult> folds;

    bool complete() const;
    double mean_accuracy() const;  // over successful folds
    double stddev_accuracy() const;
    double mean_decisions() const;
    double train_seconds() const;
    double classify_seconds() const;
};

struct DatasetInfo {
    std::string name;
    std::string path;
    CsvOptions csv;
    std::uint64_t hash = 0;
    std::size_t examples = 0;
    int classes = 0;
    std::size_t features = 0;
};

struct WilcoxonResult {
    std::optional<double> p_value;  // undefined with fewer than 5 non-zero differences
    int win = 0;
    int lose = 0;
    int draw = 0;
    std::size_t nonzero = 0;
    double w_plus = 0.0;
    bool exact = false;
};

struct PairwiseResult {
    Strategy a = Strategy::ovo;
    Strategy b = Strategy::ovo;
    WilcoxonResult test;
};

struct EvaluationReport {
    CvOptions options;
    std::vector<Strategy> methods;
    std::vector<DatasetInfo> datasets;
    std::vector<MethodResult> cells;
    std::vector<PairwiseResult> comparisons;

    std::size_t failed_cells() const;
    const MethodResult* find(std::string_view dataset, Strategy method) const;
};

// Cross-validates each method on ds (raw features). Per outer fold: features
// are normalized with the training split's ranges, (gamma, C) is chosen per
// method by inner cross-validation on the training split, then the method is
// trained and scored on the held-out fold. A method failing on a fold is
// recorded and the fold skipped.
std::vector<MethodResult> run_cv(const Dataset& ds, const std::string& name, std::span<const Strategy> methods,
                                 const CvOptions& options);
MethodResult run_cv(const Dataset& ds, const std::string& name, Strategy method, const CvOptions& options);

struct Selection {
    double gamma = 0.0;
    double c_reg = 0.0;
    double inner_accuracy = 0.0;
};

// Inner-validation grid search on an already normalized training set. Ties go
// to the smaller C, then the smaller gamma. A single-point grid is returned
// without validation.
Selection select_hyperparameters(const Dataset& train, Strategy method, const CvOptions& options,
                                 std::uint64_t seed);

// Normalizes ds, selects hyperparameters and trains method on all of it.
ModelBundle train_bundle(const Dataset& ds, Strategy method, const CvOptions& options);

enum class WilcoxonMode { automatic, exact, normal };

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences are
// dropped (counted as draws) and tied ranks averaged. automatic uses the exact
// null distribution up to 25 non-zero pairs, the normal approximation with
// continuity correction above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMode mode = WilcoxonMode::automatic);

// Pairwise tests over datasets on per-dataset mean accuracy, for every method
// pair in report.methods order.
void compute_comparisons(EvaluationReport& report);

enum class ReportFormat { text, csv, json };
ReportFormat parse_report_format(std::string_view name);
std::string_view report_extension(ReportFormat format);

std::string emit_report(const EvaluationReport& report, ReportFormat format);
// Also reads a manifest, which yields a report without cells.
EvaluationReport report_from_json(const std::string& text);
// Options, methods and dataset identities sufficient to rerun the benchmark.
std::string emit_manifest(const EvaluationReport& report);

}  // namespace svmtree
