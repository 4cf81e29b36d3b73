#include "svmtree/kernel.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "svmtree/error.hpp"

namespace svmtree {

void KernelSpec::validate() const {
    if (kind == KernelKind::rbf && !(gamma > 0.0 && std::isfinite(gamma)))
        fail(ErrorCode::invalid_argument, "rbf kernel needs gamma > 0");
}

double KernelSpec::operator()(FeatureRef a, FeatureRef b) const {
    if (a.size() != b.size())
        fail(ErrorCode::dimension_mismatch, "kernel arguments have " + std::to_string(a.size()) + " and " +
                                                std::to_string(b.size()) + " features");
    // Four independent partial sums so the loop pipelines without -ffast-math.
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    if (kind == KernelKind::linear) {
        for (; i + 4 <= n; i += 4) {
            s0 += pa[i] * pb[i];
            s1 += pa[i + 1] * pb[i + 1];
            s2 += pa[i + 2] * pb[i + 2];
            s3 += pa[i + 3] * pb[i + 3];
        }
        for (; i < n; ++i) s0 += pa[i] * pb[i];
        return (s0 + s1) + (s2 + s3);
    }
    for (; i + 4 <= n; i += 4) {
        const double d0 = pa[i] - pb[i], d1 = pa[i + 1] - pb[i + 1];
        const double d2 = pa[i + 2] - pb[i + 2], d3 = pa[i + 3] - pb[i + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    for (; i < n; ++i) {
        const double d = pa[i] - pb[i];
        s0 += d * d;
    }
    return std::exp(-gamma * ((s0 + s1) + (s2 + s3)));
}

PointKernel::PointKernel(const KernelTable& table, FeatureRef x)
    : table_(table), x_(x), values_(table.size(), std::numeric_limits<double>::quiet_NaN()) {}

double PointKernel::at(std::size_t i) {
    double& v = values_[i];
    if (std::isnan(v)) v = table_.kernel()(table_.point(i), x_);
    return v;
}

namespace {
std::atomic<std::uint64_t> next_table_id{1};
}

KernelTable::KernelTable(std::vector<FeatureRef> points, KernelSpec kernel)
    : points_(std::move(points)), kernel_(kernel), id_(next_table_id++) {
    kernel_.validate();
    const std::size_t n = points_.size();
    if (n == 0 || n > kFullGramLimit) return;
    gram_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernel_(points_[i], points_[j]);
            gram_[i * n + j] = v;
            gram_[j * n + i] = v;
        }
    }
}

}  // namespace svmtree
