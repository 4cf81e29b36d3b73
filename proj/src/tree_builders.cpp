#include "svmtree/tree_builders.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>

#include "svmtree/error.hpp"
#include "svmtree/random.hpp"

namespace svmtree {

std::vector<std::pair<int, int>> centroid_ranking(const TrainingData& data, std::span<const int> classes) {
    const auto& ds = data.dataset();
    const std::size_t dim = ds.feature_dim();
    FeatureVector global(dim, 0.0);
    std::map<int, FeatureVector> centroid;
    std::size_t total = 0;
    for (int c : classes) {
        auto& cen = centroid[c];
        cen.assign(dim, 0.0);
        const auto idx = data.indices_of(c);
        for (auto i : idx)
            for (std::size_t j = 0; j < dim; ++j) cen[j] += ds[i].features[j];
        for (std::size_t j = 0; j < dim; ++j) {
            global[j] += cen[j];
            cen[j] /= static_cast<double>(idx.size());
        }
        total += idx.size();
    }
    for (auto& v : global) v /= static_cast<double>(total);

    std::vector<std::pair<double, int>> by_distance;
    for (int c : classes) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) d2 += (centroid[c][j] - global[j]) * (centroid[c][j] - global[j]);
        by_distance.emplace_back(std::sqrt(d2), c);
    }
    std::sort(by_distance.begin(), by_distance.end());

    // Nearest pair first, then pairs that bring in the next-nearest class.
    std::vector<std::pair<int, int>> ranked;
    for (std::size_t hi = 1; hi < by_distance.size(); ++hi)
        for (std::size_t lo = 0; lo < hi; ++lo) {
            const int a = by_distance[lo].second, c = by_distance[hi].second;
            ranked.emplace_back(std::min(a, c), std::max(a, c));
        }
    return ranked;
}

namespace {

using ClassPair = std::pair<int, int>;

std::vector<ClassPair> pairs_of(std::span<const int> classes) {
    std::vector<ClassPair> out;
    for (std::size_t a = 0; a < classes.size(); ++a)
        for (std::size_t b = a + 1; b < classes.size(); ++b) out.emplace_back(classes[a], classes[b]);
    return out;
}

// P/N from majority votes, with the generating-pair fallback when a side
// would be empty.
std::pair<std::vector<int>, std::vector<int>> split_sides(const SplitCounts& counts,
                                                          std::optional<ClassPair> generating_pair) {
    std::vector<int> pos, neg;
    for (const auto& c : counts.classes) (c.pos > c.neg ? pos : neg).push_back(c.class_id);
    if (!pos.empty() && !neg.empty()) return {pos, neg};
    if (!generating_pair)
        fail(ErrorCode::build_failure, "class grouping put every class on one side of the initial classifier");
    pos.clear();
    neg.clear();
    for (const auto& c : counts.classes) {
        if (c.class_id == generating_pair->first) pos.push_back(c.class_id);
        else if (c.class_id == generating_pair->second) neg.push_back(c.class_id);
        else (c.pos > c.neg ? pos : neg).push_back(c.class_id);
    }
    if (pos.empty() || neg.empty()) fail(ErrorCode::build_failure, "generating pair is not part of the candidate set");
    return {pos, neg};
}

GroupingResult train_grouping(std::vector<int> pos, std::vector<int> neg, const TrainingData& data,
                              const TrainConfig& cfg) {
    GroupingResult g;
    g.pos_classes = std::move(pos);
    g.neg_classes = std::move(neg);
    const auto pos_idx = data.indices_of(g.pos_classes);
    const auto neg_idx = data.indices_of(g.neg_classes);
    g.final_classifier = train_classes(data, g.pos_classes, g.neg_classes, cfg);

    const auto f = decision_values(g.final_classifier, data.table());
    bool any_pos = false, any_neg = false;
    for (const auto* idx : {&pos_idx, &neg_idx})
        for (auto i : *idx) (f[i] >= 0.0 ? any_pos : any_neg) = true;
    g.separates = any_pos && any_neg;
    return g;
}

// Shared top-down construction. The strategy ranks initial classifiers for a
// candidate set and picks among their groupings.
class TreeBuilder {
public:
    using Choose = std::function<const GroupingResult&(std::span<const int>, TreeBuilder&)>;

    explicit TreeBuilder(NodeCache& cache) : cache_(cache) {}

    DecisionTree build(const Choose& choose) {
        const auto& classes = cache_.data().classes();
        if (classes.size() < 2) fail(ErrorCode::build_failure, "need at least two classes");
        tree_.nodes.clear();
        grow(classes, choose);
        tree_.validate();
        return std::move(tree_);
    }

    const GroupingResult& grouping(const ClassPair& pair, std::span<const int> classes) {
        auto [pos, neg] = split_sides(cache_.counts(pair, classes), pair);
        return cache_.grouping(std::move(pos), std::move(neg));
    }

    // Pairs of K sorted by ascending entropy; ties keep lexicographic order.
    std::vector<ClassPair> entropy_ranking(std::span<const int> classes) {
        auto pairs = pairs_of(classes);
        std::vector<double> h(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k) h[k] = entropy(cache_.counts(pairs[k], classes));
        std::vector<std::size_t> order(pairs.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return h[a] < h[b]; });
        std::vector<ClassPair> ranked;
        for (auto k : order) ranked.push_back(pairs[k]);
        return ranked;
    }

    // First ranked pair whose grouping yields a separating h'.
    const GroupingResult& first_separating(std::span<const ClassPair> ranked, std::span<const int> classes) {
        for (const auto& pair : ranked) {
            const auto& g = grouping(pair, classes);
            if (g.separates) return g;
        }
        fail(ErrorCode::build_failure, "no initial classifier yields a separating node classifier");
    }

    const TrainingData& data() const { return cache_.data(); }

private:
    int grow(std::vector<int> classes, const Choose& choose) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{});
        tree_.nodes[id].classes = classes;
        if (classes.size() == 1) {
            tree_.nodes[id].leaf_class = classes.front();
            return id;
        }
        const GroupingResult& g = choose(classes, *this);
        tree_.nodes[id].classifier = g.final_classifier;
        tree_.nodes[id].pos_classes = g.pos_classes;
        tree_.nodes[id].neg_classes = g.neg_classes;
        const int left = grow(g.pos_classes, choose);
        tree_.nodes[id].left = left;
        const int right = grow(g.neg_classes, choose);
        tree_.nodes[id].right = right;
        return id;
    }

    NodeCache& cache_;
    DecisionTree tree_;
};

DecisionTree with_pool(const TrainingData& data, const TrainConfig& cfg, const OvoPool* pool,
                       const TreeBuilder::Choose& choose) {
    std::unique_ptr<OvoPool> owned;
    if (!pool) {
        owned = std::make_unique<OvoPool>(train_ovo_pool(data, cfg));
        pool = owned.get();
    }
    NodeCache cache(data, cfg, *pool);
    return TreeBuilder(cache).build(choose);
}

const GroupingResult& choose_ib(std::span<const int> classes, TreeBuilder& b) {
    return b.first_separating(b.entropy_ranking(classes), classes);
}

TreeBuilder::Choose choose_ibge(double frac, const GenErrorParams& bound) {
    bound.validate();
    require(frac > 0.0 && frac <= 1.0, "candidate fraction must lie in (0, 1]");
    return [frac, bound](std::span<const int> classes, TreeBuilder& b) -> const GroupingResult& {
        const auto ranked = b.entropy_ranking(classes);
        const std::size_t shortlist = ibge_candidate_count(classes.size(), frac);
        const GroupingResult* best = nullptr;
        double best_bound = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < shortlist; ++k) {
            const auto& g = b.grouping(ranked[k], classes);
            if (!g.separates) continue;
            const double e = generalization_error_bound(g.final_classifier.stats, bound);
            if (!best || e < best_bound) best = &g, best_bound = e;
        }
        if (best) return *best;
        return b.first_separating(std::span(ranked).subspan(shortlist), classes);
    };
}

TreeBuilder::Choose choose_bts(std::uint64_t seed) {
    auto rng = std::make_shared<Rng>(seed);
    return [rng](std::span<const int> classes, TreeBuilder& b) -> const GroupingResult& {
        auto pairs = pairs_of(classes);
        shuffle(pairs, *rng);
        return b.first_separating(pairs, classes);
    };
}

const GroupingResult& choose_cbts(std::span<const int> classes, TreeBuilder& b) {
    return b.first_separating(centroid_ranking(b.data(), classes), classes);
}

}  // namespace

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::internal_count() const { return nodes.size() - leaf_count(); }

std::size_t DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::function<std::size_t(int)> walk = [&](int id) -> std::size_t {
        const auto& n = nodes[static_cast<std::size_t>(id)];
        return n.is_leaf() ? 0 : 1 + std::max(walk(n.left), walk(n.right));
    };
    return walk(0);
}

void DecisionTree::validate() const {
    if (nodes.empty()) fail(ErrorCode::build_failure, "empty tree");
    std::vector<int> visits(nodes.size(), 0);
    std::function<void(int)> walk = [&](int id) {
        if (id < 0 || static_cast<std::size_t>(id) >= nodes.size()) fail(ErrorCode::build_failure, "dangling child");
        if (++visits[static_cast<std::size_t>(id)] > 1) fail(ErrorCode::build_failure, "node reached twice");
        const auto& n = nodes[static_cast<std::size_t>(id)];
        if (n.is_leaf()) {
            if (n.classes != std::vector<int>{n.leaf_class}) fail(ErrorCode::build_failure, "leaf candidate set mismatch");
            return;
        }
        std::vector<int> all = n.pos_classes;
        all.insert(all.end(), n.neg_classes.begin(), n.neg_classes.end());
        std::sort(all.begin(), all.end());
        if (n.pos_classes.empty() || n.neg_classes.empty() || all != n.classes ||
            std::adjacent_find(all.begin(), all.end()) != all.end())
            fail(ErrorCode::build_failure, "node sides do not partition its candidate set");
        if (n.left < 0 || n.right < 0 || nodes[static_cast<std::size_t>(n.left)].classes != n.pos_classes ||
            nodes[static_cast<std::size_t>(n.right)].classes != n.neg_classes)
            fail(ErrorCode::build_failure, "children do not match the node's sides");
        walk(n.left);
        walk(n.right);
    };
    walk(0);
    if (std::count(visits.begin(), visits.end(), 0) != 0) fail(ErrorCode::build_failure, "unreachable nodes");
}

SplitCounts side_counts(const BinaryModel& h, std::span<const int> classes, const TrainingData& data) {
    const auto f = decision_values(h, data.table());
    SplitCounts out;
    for (int c : classes) {
        ClassSplit s{c, 0, 0};
        for (auto i : data.indices_of(c)) (f[i] >= 0.0 ? s.pos : s.neg)++;
        out.classes.push_back(s);
    }
    return out;
}

NodeCache::NodeCache(const TrainingData& data, const TrainConfig& cfg, const OvoPool& pool)
    : data_(data), cfg_(cfg), pool_(pool) {
    if (pool.classes() != data.classes())
        fail(ErrorCode::invalid_argument, "OVO pool classes do not match the training data");
}

const std::vector<std::uint8_t>& NodeCache::sides(int a, int b) {
    const ClassPair key{std::min(a, b), std::max(a, b)};
    auto it = sides_.find(key);
    if (it != sides_.end()) return it->second;
    const auto f = decision_values(pool_.at(key.first, key.second), data_.table());
    std::vector<std::uint8_t> positive(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) positive[i] = f[i] >= 0.0;
    return sides_.emplace(key, std::move(positive)).first->second;
}

SplitCounts NodeCache::counts(const std::pair<int, int>& pair, std::span<const int> classes) {
    const auto& positive = sides(pair.first, pair.second);
    SplitCounts out;
    for (int c : classes) {
        ClassSplit s{c, 0, 0};
        for (auto i : data_.indices_of(c)) (positive[i] ? s.pos : s.neg)++;
        out.classes.push_back(s);
    }
    return out;
}

const GroupingResult& NodeCache::grouping(std::vector<int> pos, std::vector<int> neg) {
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    auto key = std::make_pair(pos, neg);
    auto it = groupings_.find(key);
    if (it == groupings_.end())
        it = groupings_.emplace(std::move(key), train_grouping(std::move(pos), std::move(neg), data_, cfg_)).first;
    return it->second;
}

GroupingResult group_by_majority(const BinaryModel& h, std::span<const int> classes, const TrainingData& data,
                                 const TrainConfig& cfg, std::optional<std::pair<int, int>> generating_pair) {
    if (classes.size() < 2) fail(ErrorCode::invalid_argument, "grouping needs at least two candidate classes");
    auto [pos, neg] = split_sides(side_counts(h, classes, data), generating_pair);
    return train_grouping(std::move(pos), std::move(neg), data, cfg);
}

std::size_t ibge_candidate_count(std::size_t num_classes, double frac) {
    require(frac > 0.0 && frac <= 1.0, "candidate fraction must lie in (0, 1]");
    const double pairs = static_cast<double>(num_classes * (num_classes - 1) / 2);
    const auto n = static_cast<std::size_t>(std::floor(frac * pairs + 0.5));
    return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(1, static_cast<std::size_t>(pairs)));
}

DecisionTree build_ib_dtree(const TrainingData& data, const TrainConfig& cfg, const OvoPool* pool) {
    return with_pool(data, cfg, pool, choose_ib);
}

DecisionTree build_ibge_dtree(const TrainingData& data, const TrainConfig& cfg, double frac,
                              const GenErrorParams& bound, const OvoPool* pool) {
    const auto choose = choose_ibge(frac, bound);
    return with_pool(data, cfg, pool, choose);
}

DecisionTree build_bts_g(const TrainingData& data, const TrainConfig& cfg, std::uint64_t seed, const OvoPool* pool) {
    return with_pool(data, cfg, pool, choose_bts(seed));
}

DecisionTree build_cbts_g(const TrainingData& data, const TrainConfig& cfg, const OvoPool* pool) {
    return with_pool(data, cfg, pool, choose_cbts);
}

DecisionTree build_ib_dtree(NodeCache& cache) { return TreeBuilder(cache).build(choose_ib); }

DecisionTree build_ibge_dtree(NodeCache& cache, double frac, const GenErrorParams& bound) {
    return TreeBuilder(cache).build(choose_ibge(frac, bound));
}

DecisionTree build_bts_g(NodeCache& cache, std::uint64_t seed) { return TreeBuilder(cache).build(choose_bts(seed)); }

DecisionTree build_cbts_g(NodeCache& cache) { return TreeBuilder(cache).build(choose_cbts); }

DecisionTree build_ib_dtree(const Dataset& ds, const TrainConfig& cfg) {
    const TrainingData data(ds, cfg.kernel);
    return build_ib_dtree(data, cfg);
}

DecisionTree build_ibge_dtree(const Dataset& ds, const TrainConfig& cfg, double frac) {
    const TrainingData data(ds, cfg.kernel);
    return build_ibge_dtree(data, cfg, frac);
}

DecisionTree build_bts_g(const Dataset& ds, const TrainConfig& cfg, std::uint64_t seed) {
    const TrainingData data(ds, cfg.kernel);
    return build_bts_g(data, cfg, seed);
}

DecisionTree build_cbts_g(const Dataset& ds, const TrainConfig& cfg) {
    const TrainingData data(ds, cfg.kernel);
    return build_cbts_g(data, cfg);
}

namespace {

template <class Point>
Prediction walk_tree(const DecisionTree& tree, Point&& x) {
    if (tree.nodes.empty()) fail(ErrorCode::invalid_argument, "empty tree");
    Prediction p;
    const TreeNode* node = &tree.nodes.front();
    while (!node->is_leaf()) {
        ++p.decisions;
        const int next = decision(node->classifier, x) >= 0.0 ? node->left : node->right;
        node = &tree.nodes[static_cast<std::size_t>(next)];
    }
    p.class_id = node->leaf_class;
    return p;
}

}  // namespace

Prediction classify_tree(const DecisionTree& tree, FeatureRef x) { return walk_tree(tree, x); }
Prediction classify_tree(const DecisionTree& tree, PointKernel& x) { return walk_tree(tree, x); }

}  // namespace svmtree
