#include "svmtree/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "svmtree/error.hpp"
#include "svmtree/random.hpp"

namespace svmtree {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_number(const std::string& cell, std::size_t line_no) {
    if (cell.empty()) fail(ErrorCode::parse, "row " + std::to_string(line_no) + ": empty feature cell");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE)
        fail(ErrorCode::parse, "row " + std::to_string(line_no) + ": non-numeric feature cell '" + cell + "'");
    return v;
}

struct RawRow {
    std::size_t line_no;
    std::vector<std::string> cells;
};

std::vector<RawRow> read_rows(std::istream& in, bool header) {
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = !header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        rows.push_back({line_no, split_row(line)});
    }
    return rows;
}

std::size_t resolve_column(int column, std::size_t arity, std::size_t line_no) {
    const long idx = column < 0 ? static_cast<long>(arity) + column : column;
    if (idx < 0 || idx >= static_cast<long>(arity))
        fail(ErrorCode::parse, "row " + std::to_string(line_no) + ": label column " + std::to_string(column) +
                                   " out of range for " + std::to_string(arity) + " columns");
    return static_cast<std::size_t>(idx);
}

Dataset parse_stream(std::istream& in, const CsvOptions& options, const std::string& source) {
    const auto rows = read_rows(in, options.header);
    if (rows.empty()) fail(ErrorCode::parse, source + ": no data rows");

    const std::size_t arity = rows.front().cells.size();
    if (arity < 2) fail(ErrorCode::parse, "row " + std::to_string(rows.front().line_no) + ": need a label and at least one feature");
    const std::size_t label_col = resolve_column(options.label_column, arity, rows.front().line_no);

    std::vector<Example> examples;
    examples.reserve(rows.size());
    std::vector<std::string> names;
    std::unordered_map<std::string, int> ids;
    for (const auto& row : rows) {
        if (row.cells.size() != arity)
            fail(ErrorCode::parse, "row " + std::to_string(row.line_no) + ": expected " + std::to_string(arity) +
                                       " columns, found " + std::to_string(row.cells.size()));
        Example ex;
        ex.features.reserve(arity - 1);
        for (std::size_t c = 0; c < arity; ++c) {
            if (c == label_col) continue;
            ex.features.push_back(parse_number(row.cells[c], row.line_no));
        }
        const auto& label = row.cells[label_col];
        if (label.empty()) fail(ErrorCode::parse, "row " + std::to_string(row.line_no) + ": empty label");
        auto [it, inserted] = ids.try_emplace(label, static_cast<int>(names.size()) + 1);
        if (inserted) names.push_back(label);
        ex.label = it->second;
        examples.push_back(std::move(ex));
    }
    return Dataset(std::move(examples), std::move(names));
}

}  // namespace

double Normalization::apply(std::size_t feature, double x) const {
    const auto& r = ranges_[feature];
    if (!(r.max > r.min)) return 0.0;
    return 2.0 * (x - r.min) / (r.max - r.min) - 1.0;
}

FeatureVector Normalization::apply(FeatureRef x) const {
    if (x.size() != ranges_.size())
        fail(ErrorCode::dimension_mismatch, "normalization expects " + std::to_string(ranges_.size()) +
                                                " features, got " + std::to_string(x.size()));
    FeatureVector out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = apply(j, x[j]);
    return out;
}

Dataset::Dataset(std::vector<Example> examples, std::vector<std::string> class_names,
                 std::optional<Normalization> normalization)
    : examples_(std::move(examples)), class_names_(std::move(class_names)), normalization_(std::move(normalization)) {
    if (!examples_.empty()) feature_dim_ = examples_.front().features.size();
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        const auto& ex = examples_[i];
        if (ex.features.size() != feature_dim_)
            fail(ErrorCode::dimension_mismatch, "example " + std::to_string(i) + " has " +
                                                    std::to_string(ex.features.size()) + " features, expected " +
                                                    std::to_string(feature_dim_));
        if (ex.label < 1 || ex.label > num_classes())
            fail(ErrorCode::invalid_argument, "example " + std::to_string(i) + " has label outside 1.." +
                                                  std::to_string(num_classes()));
    }
    if (normalization_ && !examples_.empty() && normalization_->dim() != feature_dim_)
        fail(ErrorCode::dimension_mismatch, "normalization dimension does not match features");
}

std::vector<std::size_t> Dataset::class_histogram() const {
    std::vector<std::size_t> h(class_names_.size() + 1, 0);
    for (const auto& ex : examples_) ++h[static_cast<std::size_t>(ex.label)];
    return h;
}

std::vector<int> Dataset::present_classes() const {
    const auto h = class_histogram();
    std::vector<int> out;
    for (std::size_t c = 1; c < h.size(); ++c)
        if (h[c] > 0) out.push_back(static_cast<int>(c));
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Example> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(examples_.at(i));
    Dataset out(std::move(picked), class_names_, normalization_);
    out.feature_dim_ = feature_dim_;
    return out;
}

std::uint64_t Dataset::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& name : class_names_) {
        h = fnv1a(name.data(), name.size(), h);
        h = fnv1a("\0", 1, h);
    }
    for (const auto& ex : examples_) {
        h = fnv1a(&ex.label, sizeof ex.label, h);
        h = fnv1a(ex.features.data(), ex.features.size() * sizeof(double), h);
    }
    return h;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    return parse_stream(in, options, path);
}

Dataset parse_csv(const std::string& text, const CsvOptions& options) {
    std::istringstream in(text);
    return parse_stream(in, options, "<string>");
}

std::vector<FeatureVector> load_feature_rows(const std::string& path, bool header, std::optional<int> drop_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    const auto rows = read_rows(in, header);
    std::vector<FeatureVector> out;
    out.reserve(rows.size());
    std::size_t arity = rows.empty() ? 0 : rows.front().cells.size();
    for (const auto& row : rows) {
        if (row.cells.size() != arity)
            fail(ErrorCode::parse, "row " + std::to_string(row.line_no) + ": expected " + std::to_string(arity) +
                                       " columns, found " + std::to_string(row.cells.size()));
        const std::size_t skip = drop_column ? resolve_column(*drop_column, arity, row.line_no) : arity;
        FeatureVector x;
        x.reserve(arity);
        for (std::size_t c = 0; c < arity; ++c)
            if (c != skip) x.push_back(parse_number(row.cells[c], row.line_no));
        out.push_back(std::move(x));
    }
    return out;
}

Normalization fit_normalization(const Dataset& ds) {
    require(!ds.empty(), "cannot fit normalization on an empty dataset");
    std::vector<FeatureRange> ranges(ds.feature_dim());
    for (std::size_t j = 0; j < ranges.size(); ++j) ranges[j] = {ds[0].features[j], ds[0].features[j]};
    for (const auto& ex : ds.examples())
        for (std::size_t j = 0; j < ranges.size(); ++j) {
            ranges[j].min = std::min(ranges[j].min, ex.features[j]);
            ranges[j].max = std::max(ranges[j].max, ex.features[j]);
        }
    return Normalization(std::move(ranges));
}

Dataset normalize(const Dataset& ds) {
    require(!ds.normalization().has_value(), "dataset is already normalized");
    return apply_normalization(ds, fit_normalization(ds));
}

Dataset apply_normalization(const Dataset& ds, const Normalization& norm) {
    std::vector<Example> mapped;
    mapped.reserve(ds.size());
    for (const auto& ex : ds.examples()) mapped.push_back({norm.apply(ex.features), ex.label});
    return Dataset(std::move(mapped), ds.class_names(), norm);
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::size_t FoldPlan::fold_size(int fold) const {
    return static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), fold));
}

FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed) {
    require(k >= 2, "fold count must be at least 2");
    if (static_cast<std::size_t>(k) > ds.size())
        fail(ErrorCode::invalid_argument, "fold count " + std::to_string(k) + " exceeds example count " +
                                              std::to_string(ds.size()));
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds[i].label].push_back(i);

    FoldPlan plan{k, std::vector<int>(ds.size(), 0), seed};
    Rng rng(seed);
    std::size_t deal = 0;
    for (auto& [label, members] : by_class) {
        shuffle(members, rng);
        for (auto i : members) plan.assignments[i] = static_cast<int>(deal++ % static_cast<std::size_t>(k));
    }
    return plan;
}

}  // namespace svmtree
