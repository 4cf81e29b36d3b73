#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "svmtree/dataset.hpp"

namespace svmtree {

enum class KernelKind { rbf, linear };

struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double gamma = 1.0;  // rbf only

    void validate() const;
    double operator()(FeatureRef a, FeatureRef b) const;

    static KernelSpec rbf(double gamma) { return {KernelKind::rbf, gamma}; }
    static KernelSpec linear() { return {KernelKind::linear, 0.0}; }
    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// Above this many points the table stops materializing the full Gram matrix
// and kernel values are computed on demand.
inline constexpr std::size_t kFullGramLimit = 4000;

// Kernel values over a fixed point set. The points are borrowed and must
// outlive the table. Immutable after construction.
class KernelTable {
public:
    KernelTable(std::vector<FeatureRef> points, KernelSpec kernel);

    std::size_t size() const { return points_.size(); }
    const KernelSpec& kernel() const { return kernel_; }
    FeatureRef point(std::size_t i) const { return points_[i]; }
    bool dense() const { return !gram_.empty() || points_.empty(); }
    // Process-unique identity; models trained against this table remember it.
    std::uint64_t id() const { return id_; }

    // Row i of the Gram matrix, or nullptr when the table is not dense.
    const double* row(std::size_t i) const { return gram_.empty() ? nullptr : gram_.data() + i * points_.size(); }
    double at(std::size_t i, std::size_t j) const {
        return gram_.empty() ? kernel_(points_[i], points_[j]) : gram_[i * points_.size() + j];
    }

private:
    std::vector<FeatureRef> points_;
    KernelSpec kernel_;
    std::vector<double> gram_;
    std::uint64_t id_;
};

// Kernel values between one outside point and every table point, filled in
// on first use. Lets many models trained on the same table share work when
// classifying x. Not thread-safe.
class PointKernel {
public:
    PointKernel(const KernelTable& table, FeatureRef x);

    const KernelTable& table() const { return table_; }
    FeatureRef point() const { return x_; }
    double at(std::size_t i);

private:
    const KernelTable& table_;
    FeatureRef x_;
    std::vector<double> values_;
};

}  // namespace svmtree
