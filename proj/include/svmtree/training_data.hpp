#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "svmtree/dataset.hpp"
#include "svmtree/kernel.hpp"
#include "svmtree/svm_binary.hpp"

namespace svmtree {

// A training split bound to one kernel: owns the examples, the shared kernel
// table over them, and the per-class index lists the multi-class builders
// consume. Not copyable or movable since the table borrows the features.
class TrainingData {
public:
    TrainingData(Dataset ds, KernelSpec kernel);
    TrainingData(const TrainingData&) = delete;
    TrainingData& operator=(const TrainingData&) = delete;

    const Dataset& dataset() const { return ds_; }
    const KernelTable& table() const { return table_; }
    std::size_t feature_dim() const { return ds_.feature_dim(); }

    // Present classes, ascending.
    const std::vector<int>& classes() const { return classes_; }
    std::span<const std::size_t> indices_of(int class_id) const;
    // All indices of the given classes, in class order.
    std::vector<std::size_t> indices_of(std::span<const int> class_ids) const;

    // Kernel-space radius (see ModelStats) of the examples of class_ids.
    double radius_of(std::span<const int> class_ids) const;

private:
    Dataset ds_;
    KernelTable table_;
    std::vector<int> classes_;
    std::map<int, std::vector<std::size_t>> by_class_;
    std::map<int, std::size_t> slot_;
    // Dense tables only: row_sums_[i * k + s] sums K(i, j) over class slot s;
    // block_sums_[s * k + t] sums over both classes.
    std::vector<double> row_sums_;
    std::vector<double> block_sums_;
};

// Binary SVM of the classes in pos against those in neg.
BinaryModel train_classes(const TrainingData& data, std::span<const int> pos, std::span<const int> neg,
                          const TrainConfig& cfg);

}  // namespace svmtree
