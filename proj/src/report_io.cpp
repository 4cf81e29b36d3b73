#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "svmtree/error.hpp"
#include "svmtree/evaluation.hpp"

namespace svmtree {

namespace {

using nlohmann::json;

std::string num(double v, const char* fmt = "%.10g") {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

json options_json(const CvOptions& o) {
    return {{"folds", o.folds},
            {"inner_folds", o.inner_folds},
            {"seed", o.seed},
            {"gamma_grid", o.grid.gammas},
            {"c_grid", o.grid.cs},
            {"frac", o.strategy.frac},
            {"bound_c", o.strategy.bound.c_const},
            {"bound_delta", o.strategy.bound.delta},
            {"bts_runs", o.bts_runs},
            {"dag_orders", o.dag_orders},
            {"tolerance", o.tolerance},
            {"max_passes", o.max_passes},
            {"record_timing", o.record_timing}};
}

CvOptions options_from_json(const json& j) {
    CvOptions o;
    o.folds = j.at("folds").get<int>();
    o.inner_folds = j.at("inner_folds").get<int>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.grid.gammas = j.at("gamma_grid").get<std::vector<double>>();
    o.grid.cs = j.at("c_grid").get<std::vector<double>>();
    o.strategy.frac = j.at("frac").get<double>();
    o.strategy.bound.c_const = j.at("bound_c").get<double>();
    o.strategy.bound.delta = j.at("bound_delta").get<double>();
    o.bts_runs = j.at("bts_runs").get<int>();
    o.dag_orders = j.at("dag_orders").get<int>();
    o.tolerance = j.at("tolerance").get<double>();
    o.max_passes = j.at("max_passes").get<int>();
    o.record_timing = j.at("record_timing").get<bool>();
    return o;
}

json dataset_json(const DatasetInfo& d) {
    return {{"name", d.name},   {"path", d.path},         {"label_column", d.csv.label_column},
            {"header", d.csv.header}, {"hash", hex64(d.hash)}, {"examples", d.examples},
            {"classes", d.classes},   {"features", d.features}};
}

DatasetInfo dataset_from_json(const json& j) {
    DatasetInfo d;
    d.name = j.at("name").get<std::string>();
    d.path = j.at("path").get<std::string>();
    d.csv.label_column = j.at("label_column").get<int>();
    d.csv.header = j.at("header").get<bool>();
    d.hash = parse_hex64(j.at("hash").get<std::string>());
    d.examples = j.at("examples").get<std::size_t>();
    d.classes = j.at("classes").get<int>();
    d.features = j.at("features").get<std::size_t>();
    return d;
}

json methods_json(const std::vector<Strategy>& methods) {
    json list = json::array();
    for (auto m : methods) list.push_back(std::string(strategy_name(m)));
    return list;
}

std::string emit_csv(const EvaluationReport& r) {
    std::ostringstream out;
    out << "dataset,method,fold,accuracy,mean_decisions,train_s,classify_s\n";
    for (const auto& cell : r.cells)
        for (const auto& f : cell.folds) {
            out << cell.dataset << ',' << strategy_name(cell.method) << ',' << f.fold << ',';
            if (f.ok)
                out << num(f.accuracy) << ',' << num(f.mean_decisions) << ',' << num(f.train_seconds, "%.6f") << ','
                    << num(f.classify_seconds, "%.6f") << '\n';
            else
                out << "NA,NA,NA,NA\n";
        }
    return out.str();
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

std::string emit_text(const EvaluationReport& r) {
    std::ostringstream out;
    std::size_t name_w = 8;
    for (const auto& d : r.datasets) name_w = std::max(name_w, d.name.size());
    constexpr std::size_t col = 17;

    auto header = [&](const char* title) {
        out << title << "\n" << std::left << std::setw(static_cast<int>(name_w)) << "Dataset" << std::right;
        for (auto m : r.methods) out << pad(std::string(strategy_name(m)), col);
        out << "\n";
    };

    header("Accuracy (%, mean +- std over folds)");
    for (const auto& d : r.datasets) {
        out << std::left << std::setw(static_cast<int>(name_w)) << d.name << std::right;
        for (auto m : r.methods) {
            const auto* c = r.find(d.name, m);
            std::string cell = "-";
            if (c && c->complete())
                cell = num(100.0 * c->mean_accuracy(), "%.2f") + " +- " + num(100.0 * c->stddev_accuracy(), "%.2f");
            else if (c)
                cell = "FAILED";
            out << pad(cell, col);
        }
        out << "\n";
    }

    out << "\n";
    header("Mean decisions per example");
    for (const auto& d : r.datasets) {
        out << std::left << std::setw(static_cast<int>(name_w)) << d.name << std::right;
        for (auto m : r.methods) {
            const auto* c = r.find(d.name, m);
            out << pad(c && c->complete() ? num(c->mean_decisions(), "%.3f") : (c ? "FAILED" : "-"), col);
        }
        out << "\n";
    }

    out << "\nWilcoxon signed-rank (row vs column): p-value (win-lose-draw)\n";
    for (const auto& cmp : r.comparisons) {
        const auto& t = cmp.test;
        out << strategy_name(cmp.a) << " vs " << strategy_name(cmp.b) << ": "
            << (t.p_value ? num(*t.p_value, "%.4f") : std::string("NA")) << " (" << t.win << "-" << t.lose << "-"
            << t.draw << ")\n";
    }
    return out.str();
}

std::string emit_json(const EvaluationReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        json folds = json::array();
        for (const auto& f : c.folds)
            folds.push_back({{"fold", f.fold},
                             {"ok", f.ok},
                             {"error", f.error},
                             {"test_size", f.test_size},
                             {"accuracy", f.accuracy},
                             {"mean_decisions", f.mean_decisions},
                             {"gamma", f.gamma},
                             {"c", f.c_reg},
                             {"train_s", f.train_seconds},
                             {"classify_s", f.classify_seconds}});
        cells.push_back({{"dataset", c.dataset},
                         {"method", std::string(strategy_name(c.method))},
                         {"num_classes", c.num_classes},
                         {"folds", std::move(folds)}});
    }
    json comparisons = json::array();
    for (const auto& cmp : r.comparisons) {
        const auto& t = cmp.test;
        comparisons.push_back({{"a", std::string(strategy_name(cmp.a))},
                               {"b", std::string(strategy_name(cmp.b))},
                               {"p_value", t.p_value ? json(*t.p_value) : json(nullptr)},
                               {"win", t.win},
                               {"lose", t.lose},
                               {"draw", t.draw},
                               {"nonzero", t.nonzero},
                               {"w_plus", t.w_plus},
                               {"exact", t.exact}});
    }
    json datasets = json::array();
    for (const auto& d : r.datasets) datasets.push_back(dataset_json(d));
    const json j = {{"format", "svmtree-report"},
                    {"version", 1},
                    {"options", options_json(r.options)},
                    {"methods", methods_json(r.methods)},
                    {"datasets", std::move(datasets)},
                    {"cells", std::move(cells)},
                    {"comparisons", std::move(comparisons)}};
    return j.dump(2) + "\n";
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
    if (name == "text") return ReportFormat::text;
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    fail(ErrorCode::invalid_argument, "unknown report format '" + std::string(name) + "' (expected text, csv or json)");
}

std::string_view report_extension(ReportFormat format) {
    switch (format) {
        case ReportFormat::text: return "txt";
        case ReportFormat::csv: return "csv";
        default: return "json";
    }
}

std::string emit_report(const EvaluationReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::text: return emit_text(report);
        case ReportFormat::csv: return emit_csv(report);
        default: return emit_json(report);
    }
}

EvaluationReport report_from_json(const std::string& text) {
    try {
        const auto j = json::parse(text);
        const auto format = j.at("format").get<std::string>();
        if (format != "svmtree-report" && format != "svmtree-manifest") fail(ErrorCode::format, "not a report file");
        EvaluationReport r;
        r.options = options_from_json(j.at("options"));
        for (const auto& m : j.at("methods")) r.methods.push_back(parse_strategy(m.get<std::string>()));
        for (const auto& d : j.at("datasets")) r.datasets.push_back(dataset_from_json(d));
        for (const auto& c : j.value("cells", json::array())) {
            MethodResult cell;
            cell.dataset = c.at("dataset").get<std::string>();
            cell.method = parse_strategy(c.at("method").get<std::string>());
            cell.num_classes = c.at("num_classes").get<int>();
            for (const auto& f : c.at("folds")) {
                FoldResult fr;
                fr.fold = f.at("fold").get<int>();
                fr.ok = f.at("ok").get<bool>();
                fr.error = f.at("error").get<std::string>();
                fr.test_size = f.at("test_size").get<std::size_t>();
                fr.accuracy = f.at("accuracy").get<double>();
                fr.mean_decisions = f.at("mean_decisions").get<double>();
                fr.gamma = f.at("gamma").get<double>();
                fr.c_reg = f.at("c").get<double>();
                fr.train_seconds = f.at("train_s").get<double>();
                fr.classify_seconds = f.at("classify_s").get<double>();
                cell.folds.push_back(std::move(fr));
            }
            r.cells.push_back(std::move(cell));
        }
        for (const auto& c : j.value("comparisons", json::array())) {
            PairwiseResult p;
            p.a = parse_strategy(c.at("a").get<std::string>());
            p.b = parse_strategy(c.at("b").get<std::string>());
            if (!c.at("p_value").is_null()) p.test.p_value = c.at("p_value").get<double>();
            p.test.win = c.at("win").get<int>();
            p.test.lose = c.at("lose").get<int>();
            p.test.draw = c.at("draw").get<int>();
            p.test.nonzero = c.at("nonzero").get<std::size_t>();
            p.test.w_plus = c.at("w_plus").get<double>();
            p.test.exact = c.at("exact").get<bool>();
            r.comparisons.push_back(p);
        }
        return r;
    } catch (const json::exception& e) {
        fail(ErrorCode::format, std::string("corrupt report: ") + e.what());
    } catch (const std::logic_error& e) {
        fail(ErrorCode::format, std::string("corrupt report: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::format) throw;
        fail(ErrorCode::format, std::string("corrupt report: ") + e.what());
    }
}

std::string emit_manifest(const EvaluationReport& report) {
    json datasets = json::array();
    for (const auto& d : report.datasets) datasets.push_back(dataset_json(d));
    const json j = {{"format", "svmtree-manifest"},
                    {"version", 1},
                    {"options", options_json(report.options)},
                    {"methods", methods_json(report.methods)},
                    {"datasets", std::move(datasets)}};
    return j.dump(2) + "\n";
}

}  // namespace svmtree
