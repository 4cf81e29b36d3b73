#include "svmtree/svmtree.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "svmtree/error.hpp"
#include "svmtree/evaluation.hpp"
#include "svmtree/multiclass_model.hpp"

struct svt_dataset {
    svmtree::Dataset ds;
};

struct svt_model {
    svmtree::ModelBundle bundle;
};

struct svt_report {
    svmtree::EvaluationReport report;
};

namespace {

thread_local std::string last_error;

svt_status to_status(svmtree::ErrorCode code) {
    using svmtree::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_argument: return SVT_ERR_INVALID_ARGUMENT;
        case ErrorCode::io: return SVT_ERR_IO;
        case ErrorCode::parse: return SVT_ERR_PARSE;
        case ErrorCode::dimension_mismatch: return SVT_ERR_DIMENSION;
        case ErrorCode::build_failure: return SVT_ERR_BUILD;
        case ErrorCode::unknown_strategy: return SVT_ERR_UNKNOWN_STRATEGY;
        case ErrorCode::format: return SVT_ERR_FORMAT;
    }
    return SVT_ERR_INTERNAL;
}

template <class Fn>
svt_status guarded(Fn&& fn) {
    try {
        fn();
        return SVT_OK;
    } catch (const svmtree::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SVT_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SVT_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return SVT_ERR_INTERNAL;
    }
}

void check_ptr(const void* p, const char* what) {
    if (!p) svmtree::fail(svmtree::ErrorCode::invalid_argument, std::string("null ") + what);
}

svmtree::CvOptions to_options(const svt_options* opts) {
    svt_options d;
    svt_options_default(&d);
    const svt_options& o = opts ? *opts : d;
    svmtree::CvOptions cv;
    if (o.n_gammas) {
        check_ptr(o.gammas, "gamma grid");
        cv.grid.gammas.assign(o.gammas, o.gammas + o.n_gammas);
    }
    if (o.n_cs) {
        check_ptr(o.cs, "C grid");
        cv.grid.cs.assign(o.cs, o.cs + o.n_cs);
    }
    cv.folds = o.folds;
    cv.inner_folds = o.inner_folds;
    cv.seed = o.seed;
    cv.strategy.frac = o.frac;
    cv.strategy.bound.c_const = o.bound_c;
    cv.strategy.bound.delta = o.bound_delta;
    cv.bts_runs = o.bts_runs;
    cv.dag_orders = o.dag_orders;
    cv.tolerance = o.tolerance;
    cv.max_passes = o.max_passes;
    cv.record_timing = o.record_timing != 0;
    cv.validate();
    return cv;
}

void write_text(const std::string& text, const char* path) {
    if (!path) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) svmtree::fail(svmtree::ErrorCode::io, std::string("cannot write ") + path);
    out << text;
    if (!out) svmtree::fail(svmtree::ErrorCode::io, std::string("failed writing ") + path);
}

std::string read_text(const char* path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) svmtree::fail(svmtree::ErrorCode::io, std::string("cannot open ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

svmtree::DatasetInfo describe(const svmtree::EvaluationReport& r, const svmtree::DatasetInfo& spec,
                              const svmtree::Dataset& ds) {
    for (const auto& d : r.datasets)
        if (d.name == spec.name)
            svmtree::fail(svmtree::ErrorCode::invalid_argument, "dataset '" + spec.name + "' added twice");
    svmtree::DatasetInfo info = spec;
    info.hash = ds.content_hash();
    if (spec.hash != 0 && spec.hash != info.hash)
        svmtree::fail(svmtree::ErrorCode::format, "dataset '" + spec.path + "' changed since the manifest was written");
    info.examples = ds.size();
    info.classes = ds.num_classes();
    info.features = ds.feature_dim();
    return info;
}

svmtree::DatasetInfo spec_for(const char* path, int label_column, int has_header) {
    svmtree::DatasetInfo spec;
    spec.name = path;
    spec.path = path;
    spec.csv = {label_column, has_header != 0};
    return spec;
}

void add_dataset(svmtree::EvaluationReport& r, const svmtree::DatasetInfo& spec) {
    const auto ds = svmtree::load_csv(spec.path, spec.csv);
    const auto info = describe(r, spec, ds);
    auto cells = svmtree::run_cv(ds, info.name, r.methods, r.options);
    r.datasets.push_back(info);
    for (auto& c : cells) r.cells.push_back(std::move(c));
    svmtree::compute_comparisons(r);
}

}  // namespace

extern "C" {

const char* svt_version(void) { return "1.0.0"; }

const char* svt_last_error(void) { return last_error.c_str(); }

const char* svt_status_name(svt_status status) {
    switch (status) {
        case SVT_OK: return "ok";
        case SVT_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SVT_ERR_IO: return "i/o error";
        case SVT_ERR_PARSE: return "parse error";
        case SVT_ERR_DIMENSION: return "dimension mismatch";
        case SVT_ERR_BUILD: return "build failure";
        case SVT_ERR_UNKNOWN_STRATEGY: return "unknown strategy";
        case SVT_ERR_FORMAT: return "format error";
        case SVT_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

svt_status svt_dataset_load_csv(const char* path, int label_column, int has_header, svt_dataset** out) {
    return guarded([&] {
        check_ptr(path, "path");
        check_ptr(out, "output handle");
        *out = nullptr;
        *out = new svt_dataset{svmtree::load_csv(path, {label_column, has_header != 0})};
    });
}

void svt_dataset_free(svt_dataset* ds) { delete ds; }
size_t svt_dataset_size(const svt_dataset* ds) { return ds ? ds->ds.size() : 0; }
int svt_dataset_num_classes(const svt_dataset* ds) { return ds ? ds->ds.num_classes() : 0; }
size_t svt_dataset_feature_dim(const svt_dataset* ds) { return ds ? ds->ds.feature_dim() : 0; }
uint64_t svt_dataset_hash(const svt_dataset* ds) { return ds ? ds->ds.content_hash() : 0; }

void svt_options_default(svt_options* opts) {
    static const double kGammas[] = {0.001, 0.01, 0.1, 1, 10};
    static const double kCs[] = {1, 10, 100, 1000};
    if (!opts) return;
    *opts = svt_options{};
    opts->gammas = kGammas;
    opts->n_gammas = 5;
    opts->cs = kCs;
    opts->n_cs = 4;
    opts->folds = 10;
    opts->inner_folds = 3;
    opts->seed = 0;
    opts->frac = 0.2;
    opts->bound_c = 0.1;
    opts->bound_delta = 0.01;
    opts->bts_runs = 10;
    opts->dag_orders = 1000;
    opts->tolerance = 1e-3;
    opts->max_passes = 1000;
    opts->record_timing = 0;
}

svt_status svt_model_train(const svt_dataset* ds, const char* strategy, const svt_options* opts, svt_model** out) {
    return guarded([&] {
        check_ptr(ds, "dataset");
        check_ptr(strategy, "strategy");
        check_ptr(out, "output handle");
        *out = nullptr;
        const auto s = svmtree::parse_strategy(strategy);
        *out = new svt_model{svmtree::train_bundle(ds->ds, s, to_options(opts))};
    });
}

svt_status svt_model_save(const svt_model* model, const char* path) {
    return guarded([&] {
        check_ptr(model, "model");
        check_ptr(path, "path");
        svmtree::save_model(model->bundle, path);
    });
}

svt_status svt_model_load(const char* path, svt_model** out) {
    return guarded([&] {
        check_ptr(path, "path");
        check_ptr(out, "output handle");
        *out = nullptr;
        *out = new svt_model{svmtree::load_model(path)};
    });
}

void svt_model_free(svt_model* model) { delete model; }

const char* svt_model_strategy(const svt_model* model) {
    return model ? svmtree::strategy_name(model->bundle.model.strategy).data() : "";
}

size_t svt_model_feature_dim(const svt_model* model) { return model ? model->bundle.normalization.dim() : 0; }

int svt_model_num_classes(const svt_model* model) {
    return model ? static_cast<int>(svmtree::model_classes(model->bundle.model).size()) : 0;
}

size_t svt_model_internal_nodes(const svt_model* model) {
    if (!model) return 0;
    const auto* tree = std::get_if<svmtree::DecisionTree>(&model->bundle.model.body);
    return tree ? tree->internal_count() : 0;
}

double svt_model_gamma(const svt_model* model) { return model ? model->bundle.model.config.kernel.gamma : 0.0; }
double svt_model_c(const svt_model* model) { return model ? model->bundle.model.config.c_reg : 0.0; }

svt_status svt_model_predict(const svt_model* model, const double* x, size_t dim, int* class_id, const char** label,
                             size_t* decisions) {
    return guarded([&] {
        check_ptr(model, "model");
        if (dim > 0) check_ptr(x, "feature row");
        const auto p = svmtree::predict_raw(model->bundle, std::span<const double>(x, dim));
        if (class_id) *class_id = p.class_id;
        if (label) *label = model->bundle.class_names.at(static_cast<std::size_t>(p.class_id - 1)).c_str();
        if (decisions) *decisions = p.decisions;
    });
}

svt_status svt_model_predict_csv(const svt_model* model, const char* input_path, int has_header, int drop_label,
                                 int label_column, const char* output_path) {
    return guarded([&] {
        check_ptr(model, "model");
        check_ptr(input_path, "input path");
        std::optional<int> drop;
        if (drop_label) drop = label_column;
        const auto rows = svmtree::load_feature_rows(input_path, has_header != 0, drop);
        std::string out = "predicted,decisions\n";
        for (const auto& x : rows) {
            const auto p = svmtree::predict_raw(model->bundle, x);
            out += model->bundle.class_names.at(static_cast<std::size_t>(p.class_id - 1));
            out += ',';
            out += std::to_string(p.decisions);
            out += '\n';
        }
        write_text(out, output_path);
    });
}

svt_status svt_report_create(const svt_options* opts, const char* const* strategies, size_t n_strategies,
                             svt_report** out) {
    return guarded([&] {
        check_ptr(out, "output handle");
        *out = nullptr;
        if (n_strategies == 0) svmtree::fail(svmtree::ErrorCode::invalid_argument, "at least one strategy is required");
        check_ptr(strategies, "strategy list");
        svmtree::EvaluationReport r;
        r.options = to_options(opts);
        for (size_t i = 0; i < n_strategies; ++i) {
            check_ptr(strategies[i], "strategy");
            const auto s = svmtree::parse_strategy(strategies[i]);
            if (std::find(r.methods.begin(), r.methods.end(), s) == r.methods.end()) r.methods.push_back(s);
        }
        *out = new svt_report{std::move(r)};
    });
}

svt_status svt_report_add_dataset(svt_report* report, const char* path, int label_column, int has_header) {
    return guarded([&] {
        check_ptr(report, "report");
        check_ptr(path, "path");
        add_dataset(report->report, spec_for(path, label_column, has_header));
    });
}

svt_status svt_report_declare_dataset(svt_report* report, const char* path, int label_column, int has_header) {
    return guarded([&] {
        check_ptr(report, "report");
        check_ptr(path, "path");
        const auto spec = spec_for(path, label_column, has_header);
        const auto ds = svmtree::load_csv(spec.path, spec.csv);
        report->report.datasets.push_back(describe(report->report, spec, ds));
    });
}

svt_status svt_report_run_manifest(const char* manifest_path, svt_report** out) {
    return guarded([&] {
        check_ptr(manifest_path, "path");
        check_ptr(out, "output handle");
        *out = nullptr;
        const auto manifest = svmtree::report_from_json(read_text(manifest_path));
        manifest.options.validate();
        if (manifest.methods.empty()) svmtree::fail(svmtree::ErrorCode::format, "manifest lists no strategies");
        svmtree::EvaluationReport r;
        r.options = manifest.options;
        r.methods = manifest.methods;
        for (const auto& d : manifest.datasets) add_dataset(r, d);
        *out = new svt_report{std::move(r)};
    });
}

svt_status svt_report_load_json(const char* path, svt_report** out) {
    return guarded([&] {
        check_ptr(path, "path");
        check_ptr(out, "output handle");
        *out = nullptr;
        *out = new svt_report{svmtree::report_from_json(read_text(path))};
    });
}

svt_status svt_report_merge(svt_report* dst, const svt_report* src) {
    return guarded([&] {
        check_ptr(dst, "destination report");
        check_ptr(src, "source report");
        auto& d = dst->report;
        for (auto m : src->report.methods)
            if (std::find(d.methods.begin(), d.methods.end(), m) == d.methods.end()) d.methods.push_back(m);
        for (const auto& info : src->report.datasets) {
            const bool known = std::any_of(d.datasets.begin(), d.datasets.end(),
                                           [&](const auto& x) { return x.name == info.name; });
            if (!known) d.datasets.push_back(info);
        }
        for (const auto& cell : src->report.cells)
            if (!d.find(cell.dataset, cell.method)) d.cells.push_back(cell);
        svmtree::compute_comparisons(d);
    });
}

void svt_report_free(svt_report* report) { delete report; }
size_t svt_report_cell_count(const svt_report* report) { return report ? report->report.cells.size() : 0; }
size_t svt_report_failed_cells(const svt_report* report) { return report ? report->report.failed_cells() : 0; }

svt_status svt_report_cell(const svt_report* report, const char* dataset, const char* strategy, double* mean_accuracy,
                           double* mean_decisions) {
    return guarded([&] {
        check_ptr(report, "report");
        check_ptr(dataset, "dataset");
        check_ptr(strategy, "strategy");
        const auto* cell = report->report.find(dataset, svmtree::parse_strategy(strategy));
        if (!cell) svmtree::fail(svmtree::ErrorCode::invalid_argument, "no such report cell");
        if (mean_accuracy) *mean_accuracy = cell->mean_accuracy();
        if (mean_decisions) *mean_decisions = cell->mean_decisions();
    });
}

svt_status svt_report_write(const svt_report* report, const char* format, const char* path) {
    return guarded([&] {
        check_ptr(report, "report");
        check_ptr(format, "format");
        if (std::string_view(format) == "manifest") {
            write_text(svmtree::emit_manifest(report->report), path);
            return;
        }
        write_text(svmtree::emit_report(report->report, svmtree::parse_report_format(format)), path);
    });
}

svt_status svt_wilcoxon(const double* a, const double* b, size_t n, double* p_value, int* p_defined, int* win,
                        int* lose, int* draw) {
    return guarded([&] {
        if (n > 0) {
            check_ptr(a, "sample a");
            check_ptr(b, "sample b");
        }
        const auto r = svmtree::wilcoxon_signed_rank(std::span<const double>(a, n), std::span<const double>(b, n));
        if (p_value) *p_value = r.p_value.value_or(0.0);
        if (p_defined) *p_defined = r.p_value.has_value();
        if (win) *win = r.win;
        if (lose) *lose = r.lose;
        if (draw) *draw = r.draw;
    });
}

}  // extern "C"
