#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "svmtree/svm_binary.hpp"
#include "svmtree/training_data.hpp"

namespace svmtree {

// A predicted class plus how many binary classifiers were evaluated to get it.
struct Prediction {
    int class_id = 0;
    std::size_t decisions = 0;
};

// One classifier per unordered class pair (i, j), i < j, positive side = i.
class OvoPool {
public:
    OvoPool() = default;
    OvoPool(std::vector<int> classes, std::map<std::pair<int, int>, BinaryModel> classifiers);

    const std::vector<int>& classes() const { return classes_; }
    const std::map<std::pair<int, int>, BinaryModel>& classifiers() const { return classifiers_; }
    // Classifier for {a, b} in either order; positive side is min(a, b).
    const BinaryModel& at(int a, int b) const;
    // True when class a beats class b at x.
    bool beats(int a, int b, FeatureRef x) const;
    bool beats(int a, int b, PointKernel& x) const;

private:
    std::vector<int> classes_;
    std::map<std::pair<int, int>, BinaryModel> classifiers_;
};

// One classifier per class, positive side = that class, negative = the rest.
class OvaPool {
public:
    OvaPool() = default;
    OvaPool(std::vector<int> classes, std::map<int, BinaryModel> classifiers);

    const std::vector<int>& classes() const { return classes_; }
    const std::map<int, BinaryModel>& classifiers() const { return classifiers_; }

private:
    std::vector<int> classes_;
    std::map<int, BinaryModel> classifiers_;
};

OvoPool train_ovo_pool(const TrainingData& data, const TrainConfig& cfg);
OvaPool train_ova_pool(const TrainingData& data, const TrainConfig& cfg);

Prediction classify_ovo_maxwins(const OvoPool& pool, FeatureRef x);
Prediction classify_ova(const OvaPool& pool, FeatureRef x);
// Overloads for pools trained on x.table(); results match the FeatureRef forms.
Prediction classify_ovo_maxwins(const OvoPool& pool, PointKernel& x);
Prediction classify_ova(const OvaPool& pool, PointKernel& x);
Prediction classify_ddag(const OvoPool& pool, std::span<const int> order, FeatureRef x);
Prediction classify_adag(const OvoPool& pool, std::span<const int> order, FeatureRef x);

// Elimination schemes over any pairwise oracle beats(a, b) -> bool, so the
// evaluation harness can replay many class orders against cached outcomes.

// DDAG: test the first against the last candidate and drop the loser.
template <class Beats>
Prediction ddag_eliminate(std::span<const int> order, Beats&& beats) {
    std::size_t lo = 0, hi = order.size() - 1, decisions = 0;
    while (lo < hi) {
        ++decisions;
        if (beats(order[lo], order[hi])) --hi;
        else ++lo;
    }
    return {order[lo], decisions};
}

// ADAG: single-elimination rounds over adjacent pairs; with an odd count the
// last class of the round gets the bye.
template <class Beats>
Prediction adag_tournament(std::span<const int> order, Beats&& beats) {
    std::vector<int> round(order.begin(), order.end());
    std::vector<int> next;
    std::size_t decisions = 0;
    while (round.size() > 1) {
        next.clear();
        for (std::size_t k = 0; k < round.size(); k += 2) {
            if (k + 1 == round.size()) {
                next.push_back(round[k]);
                continue;
            }
            ++decisions;
            next.push_back(beats(round[k], round[k + 1]) ? round[k] : round[k + 1]);
        }
        round.swap(next);
    }
    return {round.front(), decisions};
}

// Max-Wins over a pairwise oracle; vote ties go to the lowest class id.
template <class Beats>
Prediction maxwins_vote(std::span<const int> classes, Beats&& beats) {
    std::vector<std::size_t> votes(classes.size(), 0);
    std::size_t decisions = 0;
    for (std::size_t a = 0; a < classes.size(); ++a)
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
            ++decisions;
            ++votes[beats(classes[a], classes[b]) ? a : b];
        }
    std::size_t best = 0;
    for (std::size_t k = 1; k < classes.size(); ++k)
        if (votes[k] > votes[best] || (votes[k] == votes[best] && classes[k] < classes[best])) best = k;
    return {classes[best], decisions};
}

}  // namespace svmtree
