#include "svmtree/baselines.hpp"

#include <algorithm>

#include "svmtree/error.hpp"

namespace svmtree {

namespace {

void check_order(const std::vector<int>& classes, std::span<const int> order) {
    std::vector<int> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted != classes) fail(ErrorCode::invalid_argument, "class order is not a permutation of the pool classes");
}

}  // namespace

OvoPool::OvoPool(std::vector<int> classes, std::map<std::pair<int, int>, BinaryModel> classifiers)
    : classes_(std::move(classes)), classifiers_(std::move(classifiers)) {
    std::sort(classes_.begin(), classes_.end());
    const std::size_t n = classes_.size();
    if (classifiers_.size() != n * (n - 1) / 2) fail(ErrorCode::invalid_argument, "OVO pool is incomplete");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (!classifiers_.count({classes_[a], classes_[b]}))
                fail(ErrorCode::invalid_argument, "OVO pool lacks a classifier for a class pair");
}

const BinaryModel& OvoPool::at(int a, int b) const {
    const auto it = classifiers_.find({std::min(a, b), std::max(a, b)});
    if (it == classifiers_.end()) fail(ErrorCode::invalid_argument, "no classifier for this class pair");
    return it->second;
}

bool OvoPool::beats(int a, int b, FeatureRef x) const {
    const bool low_wins = decision(at(a, b), x) >= 0.0;
    return (a < b) == low_wins;
}

bool OvoPool::beats(int a, int b, PointKernel& x) const {
    const bool low_wins = decision(at(a, b), x) >= 0.0;
    return (a < b) == low_wins;
}

OvaPool::OvaPool(std::vector<int> classes, std::map<int, BinaryModel> classifiers)
    : classes_(std::move(classes)), classifiers_(std::move(classifiers)) {
    std::sort(classes_.begin(), classes_.end());
    if (classifiers_.size() != classes_.size()) fail(ErrorCode::invalid_argument, "OVA pool is incomplete");
    for (int c : classes_)
        if (!classifiers_.count(c)) fail(ErrorCode::invalid_argument, "OVA pool lacks a classifier for a class");
}

OvoPool train_ovo_pool(const TrainingData& data, const TrainConfig& cfg) {
    const auto& classes = data.classes();
    if (classes.size() < 2) fail(ErrorCode::build_failure, "need at least two classes");
    std::map<std::pair<int, int>, BinaryModel> models;
    for (std::size_t a = 0; a < classes.size(); ++a)
        for (std::size_t b = a + 1; b < classes.size(); ++b)
            models.emplace(std::pair{classes[a], classes[b]},
                           train_classes(data, std::span(&classes[a], 1), std::span(&classes[b], 1), cfg));
    return OvoPool(classes, std::move(models));
}

OvaPool train_ova_pool(const TrainingData& data, const TrainConfig& cfg) {
    const auto& classes = data.classes();
    if (classes.size() < 2) fail(ErrorCode::build_failure, "need at least two classes");
    std::map<int, BinaryModel> models;
    for (int c : classes) {
        std::vector<int> rest;
        for (int o : classes)
            if (o != c) rest.push_back(o);
        models.emplace(c, train_classes(data, std::span(&c, 1), rest, cfg));
    }
    return OvaPool(classes, std::move(models));
}

Prediction classify_ovo_maxwins(const OvoPool& pool, FeatureRef x) {
    return maxwins_vote(pool.classes(), [&](int a, int b) { return pool.beats(a, b, x); });
}

namespace {

template <class Point>
Prediction ova_argmax(const OvaPool& pool, Point&& x) {
    Prediction best{0, 0};
    double best_score = 0.0;
    for (const auto& [c, model] : pool.classifiers()) {
        const double score = decision(model, x);
        ++best.decisions;
        if (best.class_id == 0 || score > best_score) best.class_id = c, best_score = score;
    }
    return best;
}

}  // namespace

Prediction classify_ova(const OvaPool& pool, FeatureRef x) { return ova_argmax(pool, x); }
Prediction classify_ova(const OvaPool& pool, PointKernel& x) { return ova_argmax(pool, x); }

Prediction classify_ovo_maxwins(const OvoPool& pool, PointKernel& x) {
    return maxwins_vote(pool.classes(), [&](int a, int b) { return pool.beats(a, b, x); });
}

Prediction classify_ddag(const OvoPool& pool, std::span<const int> order, FeatureRef x) {
    check_order(pool.classes(), order);
    return ddag_eliminate(order, [&](int a, int b) { return pool.beats(a, b, x); });
}

Prediction classify_adag(const OvoPool& pool, std::span<const int> order, FeatureRef x) {
    check_order(pool.classes(), order);
    return adag_tournament(order, [&](int a, int b) { return pool.beats(a, b, x); });
}

}  // namespace svmtree
