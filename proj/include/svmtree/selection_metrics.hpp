#pragma once

#include <cstddef>
#include <vector>

#include "svmtree/svm_binary.hpp"

namespace svmtree {

struct ClassSplit {
    int class_id = 0;
    std::size_t pos = 0;  // examples with decision >= 0
    std::size_t neg = 0;
};

// How a classifier's hyperplane divides the examples of each candidate class.
struct SplitCounts {
    std::vector<ClassSplit> classes;

    std::size_t total_pos() const;
    std::size_t total_neg() const;
    std::size_t total() const { return total_pos() + total_neg(); }
};

struct GenErrorParams {
    double c_const = 0.1;
    double delta = 0.01;

    void validate() const;
};

// Counts examples per class on each side of h; decision exactly 0 counts as
// positive. examples[k] holds the points of class_ids[k].
SplitCounts split_counts(const BinaryModel& h, const std::vector<int>& class_ids,
                         const std::vector<std::vector<FeatureRef>>& examples);

// Weighted side entropy in bits: p+ * H(classes | +) + p- * H(classes | -).
// Zero-count terms contribute 0; an empty side contributes 0.
double entropy(const SplitCounts& counts);

// l/m + sqrt(c/m * ((R/Delta)^2 * ln(m)^2 + ln(1/delta))). +inf for
// degenerate models.
double generalization_error_bound(const ModelStats& stats, const GenErrorParams& params = {});

}  // namespace svmtree
