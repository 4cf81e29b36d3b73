#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "svmtree/baselines.hpp"
#include "svmtree/selection_metrics.hpp"
#include "svmtree/svm_binary.hpp"
#include "svmtree/training_data.hpp"

namespace svmtree {

// A leaf holds one class. An internal node holds the final classifier h' and
// the class sets it separates: positive side -> left child (pos_classes),
// negative side -> right child (neg_classes).
struct TreeNode {
    std::vector<int> classes;  // candidate set at this node, ascending
    int leaf_class = 0;        // non-zero iff leaf
    BinaryModel classifier;
    std::vector<int> pos_classes;
    std::vector<int> neg_classes;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return leaf_class != 0; }
};

// Nodes in pre-order; nodes[0] is the root.
struct DecisionTree {
    std::vector<TreeNode> nodes;

    std::size_t leaf_count() const;
    std::size_t internal_count() const;
    std::size_t depth() const;
    // Throws build_failure if the topology or class partition is inconsistent.
    void validate() const;
};

struct GroupingResult {
    BinaryModel final_classifier;
    std::vector<int> pos_classes;
    std::vector<int> neg_classes;
    // False when h' puts every training example of the node on one side.
    bool separates = true;
};

// Per-class side counts of h over the training examples of classes K.
SplitCounts side_counts(const BinaryModel& h, std::span<const int> classes, const TrainingData& data);

// Class-grouping-by-majority. Each class of K goes wholly to the side of h
// that holds strictly more of its examples (ties go negative), then h' is
// trained on the two groups. If voting empties a side and the pair (i, j)
// that generated h is given, i is forced positive and j negative.
GroupingResult group_by_majority(const BinaryModel& h, std::span<const int> classes, const TrainingData& data,
                                 const TrainConfig& cfg,
                                 std::optional<std::pair<int, int>> generating_pair = std::nullopt);

// Pairs of classes ordered for c-BTS-G: by input-space distance of class
// centroids to the centroid of all their examples, nearest pair first, then
// the pairs that bring in each next-nearest class. Distance ties go to the
// lower class id.
std::vector<std::pair<int, int>> centroid_ranking(const TrainingData& data, std::span<const int> classes);

// Shortlist size of IBGE-DTree: max(1, round-half-up(frac * k(k-1)/2)).
std::size_t ibge_candidate_count(std::size_t num_classes, double frac);

// Memo of the work trees on the same (data, config, OVO pool) have in common:
// the side of every training example under each pooled classifier, and the
// node classifier retrained for each (P, N) grouping. Sharing one cache
// across builds (e.g. repeated BTS-G runs) avoids retraining identical
// splits. data and pool must outlive it. Not thread-safe.
class NodeCache {
public:
    NodeCache(const TrainingData& data, const TrainConfig& cfg, const OvoPool& pool);

    const TrainingData& data() const { return data_; }
    const TrainConfig& cfg() const { return cfg_; }
    const OvoPool& pool() const { return pool_; }

    // 1 where the pooled classifier of {a, b} is non-negative, per example.
    const std::vector<std::uint8_t>& sides(int a, int b);
    SplitCounts counts(const std::pair<int, int>& pair, std::span<const int> classes);
    const GroupingResult& grouping(std::vector<int> pos, std::vector<int> neg);

private:
    const TrainingData& data_;
    TrainConfig cfg_;
    const OvoPool& pool_;
    std::map<std::pair<int, int>, std::vector<std::uint8_t>> sides_;
    std::map<std::pair<std::vector<int>, std::vector<int>>, GroupingResult> groupings_;
};

// Each builder may be handed the OVO pool already trained on the same data
// and config; otherwise it trains one.
DecisionTree build_ib_dtree(const TrainingData& data, const TrainConfig& cfg, const OvoPool* pool = nullptr);
DecisionTree build_ibge_dtree(const TrainingData& data, const TrainConfig& cfg, double frac = 0.2,
                              const GenErrorParams& bound = {}, const OvoPool* pool = nullptr);
DecisionTree build_bts_g(const TrainingData& data, const TrainConfig& cfg, std::uint64_t seed,
                         const OvoPool* pool = nullptr);
DecisionTree build_cbts_g(const TrainingData& data, const TrainConfig& cfg, const OvoPool* pool = nullptr);

DecisionTree build_ib_dtree(NodeCache& cache);
DecisionTree build_ibge_dtree(NodeCache& cache, double frac = 0.2, const GenErrorParams& bound = {});
DecisionTree build_bts_g(NodeCache& cache, std::uint64_t seed);
DecisionTree build_cbts_g(NodeCache& cache);

DecisionTree build_ib_dtree(const Dataset& ds, const TrainConfig& cfg);
DecisionTree build_ibge_dtree(const Dataset& ds, const TrainConfig& cfg, double frac = 0.2);
DecisionTree build_bts_g(const Dataset& ds, const TrainConfig& cfg, std::uint64_t seed);
DecisionTree build_cbts_g(const Dataset& ds, const TrainConfig& cfg);

Prediction classify_tree(const DecisionTree& tree, FeatureRef x);
// For trees whose classifiers were trained on x.table().
Prediction classify_tree(const DecisionTree& tree, PointKernel& x);

}  // namespace svmtree
