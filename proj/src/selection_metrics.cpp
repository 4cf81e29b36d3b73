#include "svmtree/selection_metrics.hpp"

#include <cmath>
#include <limits>

#include "svmtree/error.hpp"

namespace svmtree {

std::size_t SplitCounts::total_pos() const {
    std::size_t s = 0;
    for (const auto& c : classes) s += c.pos;
    return s;
}

std::size_t SplitCounts::total_neg() const {
    std::size_t s = 0;
    for (const auto& c : classes) s += c.neg;
    return s;
}

void GenErrorParams::validate() const {
    if (!(c_const > 0.0)) fail(ErrorCode::invalid_argument, "bound constant c must be positive");
    if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::invalid_argument, "bound delta must lie in (0, 1)");
}

SplitCounts split_counts(const BinaryModel& h, const std::vector<int>& class_ids,
                         const std::vector<std::vector<FeatureRef>>& examples) {
    require(class_ids.size() == examples.size(), "one example list per class is required");
    SplitCounts out;
    out.classes.reserve(class_ids.size());
    for (std::size_t k = 0; k < class_ids.size(); ++k) {
        ClassSplit s{class_ids[k], 0, 0};
        for (const auto& x : examples[k]) (decision(h, x) >= 0.0 ? s.pos : s.neg)++;
        out.classes.push_back(s);
    }
    return out;
}

namespace {

double side_entropy(const SplitCounts& counts, bool positive, double side_total) {
    if (side_total <= 0.0) return 0.0;
    double h = 0.0;
    for (const auto& c : counts.classes) {
        const auto n = positive ? c.pos : c.neg;
        if (n == 0) continue;
        const double p = static_cast<double>(n) / side_total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

double entropy(const SplitCounts& counts) {
    const double pos = static_cast<double>(counts.total_pos());
    const double neg = static_cast<double>(counts.total_neg());
    const double total = pos + neg;
    if (total <= 0.0) fail(ErrorCode::invalid_argument, "entropy of an empty split");
    return pos / total * side_entropy(counts, true, pos) + neg / total * side_entropy(counts, false, neg);
}

double generalization_error_bound(const ModelStats& stats, const GenErrorParams& params) {
    params.validate();
    if (stats.m == 0) fail(ErrorCode::invalid_argument, "bound needs m > 0");
    if (stats.degenerate || !(stats.margin_delta > 0.0)) return std::numeric_limits<double>::infinity();
    const double m = static_cast<double>(stats.m);
    const double ratio = stats.radius / stats.margin_delta;
    const double log_m = std::log(m);
    const double capacity = params.c_const / m * (ratio * ratio * log_m * log_m + std::log(1.0 / params.delta));
    return static_cast<double>(stats.l) / m + std::sqrt(capacity);
}

}  // namespace svmtree
