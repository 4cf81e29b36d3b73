#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svmtree {

using FeatureVector = std::vector<double>;
using FeatureRef = std::span<const double>;

struct Example {
    FeatureVector features;
    int label = 0;  // dense class id in 1..N
};

struct FeatureRange {
    double min = 0.0;
    double max = 0.0;
};

// Per-feature affine map onto [-1, 1] fitted on one sample and reusable on
// another. Values outside the fitted range extrapolate; nothing is clipped.
class Normalization {
public:
    Normalization() = default;
    explicit Normalization(std::vector<FeatureRange> ranges) : ranges_(std::move(ranges)) {}

    double apply(std::size_t feature, double x) const;
    FeatureVector apply(FeatureRef x) const;

    const std::vector<FeatureRange>& ranges() const { return ranges_; }
    std::size_t dim() const { return ranges_.size(); }

private:
    std::vector<FeatureRange> ranges_;
};

// Labeled feature vectors with a dense class inventory 1..N. Subsets keep the
// full inventory of their parent, so a subset may lack some classes.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Example> examples, std::vector<std::string> class_names,
            std::optional<Normalization> normalization = std::nullopt);

    const std::vector<Example>& examples() const { return examples_; }
    const Example& operator[](std::size_t i) const { return examples_[i]; }
    std::size_t size() const { return examples_.size(); }
    bool empty() const { return examples_.empty(); }

    std::size_t feature_dim() const { return feature_dim_; }
    int num_classes() const { return static_cast<int>(class_names_.size()); }
    // Original label text of class id c, c in 1..N.
    const std::string& class_name(int c) const { return class_names_.at(static_cast<std::size_t>(c - 1)); }
    const std::vector<std::string>& class_names() const { return class_names_; }
    const std::optional<Normalization>& normalization() const { return normalization_; }

    // Example count per class id; index 0 unused.
    std::vector<std::size_t> class_histogram() const;
    // Class ids that have at least one example, ascending.
    std::vector<int> present_classes() const;

    Dataset subset(std::span<const std::size_t> indices) const;
    // Stable content hash over features, labels and class names.
    std::uint64_t content_hash() const;

private:
    std::vector<Example> examples_;
    std::vector<std::string> class_names_;
    std::size_t feature_dim_ = 0;
    std::optional<Normalization> normalization_;
};

struct CsvOptions {
    int label_column = -1;  // negative counts from the end; -1 is the last column
    bool header = false;
};

// Raw (unnormalized) dataset. Labels map to dense ids in first-appearance
// order; the label text is kept as the class name.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const CsvOptions& options = {});

// Feature-only rows, e.g. prediction input. If drop_column is set that column
// is ignored. An empty input yields no rows.
std::vector<FeatureVector> load_feature_rows(const std::string& path, bool header,
                                             std::optional<int> drop_column = std::nullopt);

Normalization fit_normalization(const Dataset& ds);
// Fits on ds and maps it; ds must not already carry normalization metadata.
Dataset normalize(const Dataset& ds);
// Maps ds with ranges fitted elsewhere (e.g. on a training fold).
Dataset apply_normalization(const Dataset& ds, const Normalization& norm);

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // fold index per example
    std::uint64_t seed = 0;

    std::vector<std::size_t> train_indices(int fold) const;
    std::vector<std::size_t> test_indices(int fold) const;
    std::size_t fold_size(int fold) const;
};

// Stratified: each class is shuffled and dealt round-robin, continuing the
// deal position across classes so fold sizes also differ by at most one.
FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace svmtree
