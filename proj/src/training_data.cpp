#include "svmtree/training_data.hpp"

#include <algorithm>
#include <cmath>

#include "svmtree/error.hpp"

namespace svmtree {

namespace {
std::vector<FeatureRef> refs_of(const Dataset& ds) {
    std::vector<FeatureRef> out;
    out.reserve(ds.size());
    for (const auto& ex : ds.examples()) out.emplace_back(ex.features);
    return out;
}
}  // namespace

TrainingData::TrainingData(Dataset ds, KernelSpec kernel) : ds_(std::move(ds)), table_(refs_of(ds_), kernel) {
    for (std::size_t i = 0; i < ds_.size(); ++i) by_class_[ds_[i].label].push_back(i);
    for (const auto& [c, idx] : by_class_) {
        slot_[c] = classes_.size();
        classes_.push_back(c);
    }
    if (!table_.dense() || ds_.empty()) return;
    const std::size_t n = ds_.size(), k = classes_.size();
    row_sums_.assign(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = table_.row(i);
        for (std::size_t s = 0; s < k; ++s) {
            double acc = 0.0;
            for (auto j : by_class_[classes_[s]]) acc += row[j];
            row_sums_[i * k + s] = acc;
        }
    }
    block_sums_.assign(k * k, 0.0);
    for (std::size_t s = 0; s < k; ++s)
        for (auto i : by_class_[classes_[s]])
            for (std::size_t t = 0; t < k; ++t) block_sums_[s * k + t] += row_sums_[i * k + t];
}

double TrainingData::radius_of(std::span<const int> class_ids) const {
    const auto idx = indices_of(class_ids);
    if (idx.empty()) fail(ErrorCode::invalid_argument, "radius of an empty set");
    if (row_sums_.empty()) return kernel_radius(table_, idx);
    const std::size_t k = classes_.size();
    std::vector<std::size_t> slots;
    for (int c : class_ids) {
        const auto it = slot_.find(c);
        if (it != slot_.end()) slots.push_back(it->second);
    }
    const double m = static_cast<double>(idx.size());
    double total = 0.0;
    for (auto s : slots)
        for (auto t : slots) total += block_sums_[s * k + t];
    double r2 = 0.0;
    for (auto i : idx) {
        double row = 0.0;
        for (auto s : slots) row += row_sums_[i * k + s];
        r2 = std::max(r2, table_.at(i, i) - 2.0 * row / m);
    }
    return std::sqrt(std::max(0.0, r2 + total / (m * m)));
}

BinaryModel train_classes(const TrainingData& data, std::span<const int> pos, std::span<const int> neg,
                          const TrainConfig& cfg) {
    const auto pos_idx = data.indices_of(pos);
    const auto neg_idx = data.indices_of(neg);
    if (pos_idx.empty() || neg_idx.empty()) fail(ErrorCode::invalid_argument, "binary training needs both classes");
    std::vector<int> both(pos.begin(), pos.end());
    both.insert(both.end(), neg.begin(), neg.end());
    return train(data.table(), pos_idx, neg_idx, cfg, nullptr, data.radius_of(both));
}

std::span<const std::size_t> TrainingData::indices_of(int class_id) const {
    const auto it = by_class_.find(class_id);
    if (it == by_class_.end()) return {};
    return it->second;
}

std::vector<std::size_t> TrainingData::indices_of(std::span<const int> class_ids) const {
    std::vector<std::size_t> out;
    for (int c : class_ids) {
        const auto idx = indices_of(c);
        out.insert(out.end(), idx.begin(), idx.end());
    }
    return out;
}

}  // namespace svmtree
