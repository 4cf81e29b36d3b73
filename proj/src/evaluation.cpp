#include "svmtree/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "svmtree/error.hpp"
#include "svmtree/random.hpp"

namespace svmtree {

namespace {

constexpr std::uint64_t kOuterTag = 0xFFFFFFFFull;

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled) {
        if (enabled_) start_ = std::chrono::steady_clock::now();
    }
    double seconds() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

bool needs_pool(Strategy s) { return s != Strategy::ova; }

TrainConfig make_config(double gamma, double c, const CvOptions& opt) {
    TrainConfig cfg;
    cfg.c_reg = c;
    cfg.kernel = KernelSpec::rbf(gamma);
    cfg.tolerance = opt.tolerance;
    cfg.max_passes = opt.max_passes;
    return cfg;
}

// Sums over the test set, already averaged over repeated runs or orders.
struct Score {
    double correct = 0.0;
    double decisions = 0.0;
    std::size_t tested = 0;
    double train_seconds = 0.0;
    double classify_seconds = 0.0;
};

struct TreeRun {
    double correct = 0.0;
    double decisions = 0.0;
};

// Scores every tree on test, sharing one kernel row per test point.
TreeRun run_trees(std::span<const DecisionTree> trees, const KernelTable& table, const Dataset& test) {
    TreeRun r;
    for (const auto& ex : test.examples()) {
        PointKernel px(table, ex.features);
        for (const auto& tree : trees) {
            const auto p = classify_tree(tree, px);
            r.correct += p.class_id == ex.label;
            r.decisions += static_cast<double>(p.decisions);
        }
    }
    return r;
}

// Trains method on td and scores it on test. pool is the OVO pool of td/cfg
// (required unless the method is OVA); pool_seconds is its training time.
Score score_method(const TrainingData& td, Strategy method, const TrainConfig& cfg, const CvOptions& opt,
                   NodeCache* nodes, double pool_seconds, const Dataset& test, std::uint64_t seed) {
    const OvoPool* pool = nodes ? &nodes->pool() : nullptr;
    Score s;
    s.tested = test.size();
    const bool timing = opt.record_timing;
    if (needs_pool(method)) s.train_seconds += pool_seconds;

    switch (method) {
        case Strategy::ovo: {
            Stopwatch clock(timing);
            for (const auto& ex : test.examples()) {
                PointKernel px(td.table(), ex.features);
                const auto p = classify_ovo_maxwins(*pool, px);
                s.correct += p.class_id == ex.label;
                s.decisions += static_cast<double>(p.decisions);
            }
            s.classify_seconds = clock.seconds();
            break;
        }
        case Strategy::ova: {
            Stopwatch train_clock(timing);
            const OvaPool ova = train_ova_pool(td, cfg);
            s.train_seconds += train_clock.seconds();
            Stopwatch clock(timing);
            for (const auto& ex : test.examples()) {
                PointKernel px(td.table(), ex.features);
                const auto p = classify_ova(ova, px);
                s.correct += p.class_id == ex.label;
                s.decisions += static_cast<double>(p.decisions);
            }
            s.classify_seconds = clock.seconds();
            break;
        }
        case Strategy::ddag:
        case Strategy::adag: {
            Stopwatch clock(timing);
            const auto& classes = pool->classes();
            const std::size_t k = classes.size();
            // Outcome of every pair at every test point, replayed for each
            // order. Orders are permutations of class positions 0..k-1.
            std::vector<std::vector<std::uint8_t>> low_wins(test.size(), std::vector<std::uint8_t>(k * k, 0));
            for (std::size_t t = 0; t < test.size(); ++t) {
                PointKernel px(td.table(), test[t].features);
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = a + 1; b < k; ++b)
                        low_wins[t][a * k + b] = decision(pool->at(classes[a], classes[b]), px) >= 0.0;
            }
            std::vector<int> positions(k);
            for (std::size_t a = 0; a < k; ++a) positions[a] = static_cast<int>(a);
            const int orders = std::max(1, opt.dag_orders);
            Rng rng(seed);
            std::vector<int> order;
            std::size_t hits = 0, decisions = 0;
            for (int r = 0; r < orders; ++r) {
                order = positions;
                shuffle(order, rng);
                for (std::size_t t = 0; t < test.size(); ++t) {
                    const auto& wins = low_wins[t];
                    auto beats = [&](int a, int b) {
                        return a < b ? wins[static_cast<std::size_t>(a) * k + static_cast<std::size_t>(b)] != 0
                                     : wins[static_cast<std::size_t>(b) * k + static_cast<std::size_t>(a)] == 0;
                    };
                    const auto p = method == Strategy::ddag ? ddag_eliminate(order, beats) : adag_tournament(order, beats);
                    hits += classes[static_cast<std::size_t>(p.class_id)] == test[t].label;
                    decisions += p.decisions;
                }
            }
            s.correct = static_cast<double>(hits) / orders;
            s.decisions = static_cast<double>(decisions) / orders;
            s.classify_seconds = clock.seconds();
            break;
        }
        case Strategy::bts_g: {
            const int runs = std::max(1, opt.bts_runs);
            std::vector<DecisionTree> trees;
            Stopwatch train_clock(timing);
            for (int r = 0; r < runs; ++r)
                trees.push_back(build_bts_g(*nodes, derive_seed(seed, {static_cast<std::uint64_t>(r)})));
            s.train_seconds += train_clock.seconds() / runs;
            Stopwatch clock(timing);
            const auto run = run_trees(trees, td.table(), test);
            s.classify_seconds = clock.seconds() / runs;
            s.correct = run.correct / runs;
            s.decisions = run.decisions / runs;
            break;
        }
        default: {
            Stopwatch train_clock(timing);
            DecisionTree tree;
            switch (method) {
                case Strategy::ib_dtree: tree = build_ib_dtree(*nodes); break;
                case Strategy::ibge_dtree:
                    tree = build_ibge_dtree(*nodes, opt.strategy.frac, opt.strategy.bound);
                    break;
                case Strategy::cbts_g: tree = build_cbts_g(*nodes); break;
                default: fail(ErrorCode::invalid_argument, "not a tree strategy");
            }
            s.train_seconds += train_clock.seconds();
            Stopwatch clock(timing);
            const auto run = run_trees(std::span(&tree, 1), td.table(), test);
            s.classify_seconds = clock.seconds();
            s.correct = run.correct;
            s.decisions = run.decisions;
            break;
        }
    }
    return s;
}

struct GridPoint {
    double gamma;
    double c;
};

// Candidates in tie-break order: C ascending, then gamma ascending.
std::vector<GridPoint> grid_points(const HyperGrid& grid) {
    auto cs = grid.cs, gs = grid.gammas;
    std::sort(cs.begin(), cs.end());
    std::sort(gs.begin(), gs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    std::vector<GridPoint> out;
    for (double c : cs)
        for (double g : gs) out.push_back({g, c});
    return out;
}

std::vector<Selection> select_many(const Dataset& train, std::span<const Strategy> methods, const CvOptions& opt,
                                   std::uint64_t seed) {
    const auto points = grid_points(opt.grid);
    std::vector<Selection> chosen(methods.size(), Selection{points.front().gamma, points.front().c, 0.0});
    if (points.size() == 1 || methods.empty()) return chosen;

    // correct[m][p], tested[m][p]; a failed build poisons the grid point.
    std::vector<std::vector<double>> correct(methods.size(), std::vector<double>(points.size(), 0.0));
    std::vector<std::vector<bool>> failed(methods.size(), std::vector<bool>(points.size(), false));
    std::size_t tested = 0;

    const int inner_k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opt.inner_folds), train.size()));
    if (inner_k < 2) return chosen;
    const auto plan = make_folds(train, inner_k, derive_seed(seed, {1}));
    const bool any_pool = std::any_of(methods.begin(), methods.end(), needs_pool);

    for (int q = 0; q < inner_k; ++q) {
        const auto inner_train_idx = plan.train_indices(q);
        const Dataset inner_test = train.subset(plan.test_indices(q));
        Dataset inner_train = train.subset(inner_train_idx);
        if (inner_train.present_classes().size() < 2) continue;
        tested += inner_test.size();

        std::map<double, std::unique_ptr<TrainingData>> tables;
        for (std::size_t p = 0; p < points.size(); ++p) {
            auto& td = tables[points[p].gamma];
            if (!td) td = std::make_unique<TrainingData>(inner_train, KernelSpec::rbf(points[p].gamma));
            const auto cfg = make_config(points[p].gamma, points[p].c, opt);
            std::optional<OvoPool> pool;
            std::optional<NodeCache> nodes;
            if (any_pool) {
                pool = train_ovo_pool(*td, cfg);
                nodes.emplace(*td, cfg, *pool);
            }
            for (std::size_t m = 0; m < methods.size(); ++m) {
                if (failed[m][p]) continue;
                try {
                    const auto run_seed = derive_seed(seed, {static_cast<std::uint64_t>(methods[m]), p,
                                                             static_cast<std::uint64_t>(q)});
                    correct[m][p] +=
                        score_method(*td, methods[m], cfg, opt, nodes ? &*nodes : nullptr, 0.0, inner_test, run_seed).correct;
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::build_failure) throw;
                    failed[m][p] = true;
                }
            }
        }
    }
    if (tested == 0) return chosen;

    for (std::size_t m = 0; m < methods.size(); ++m) {
        double best = -1.0;
        for (std::size_t p = 0; p < points.size(); ++p) {
            if (failed[m][p]) continue;
            const double acc = correct[m][p] / static_cast<double>(tested);
            if (acc > best) {
                best = acc;
                chosen[m] = {points[p].gamma, points[p].c, acc};
            }
        }
    }
    return chosen;
}

}  // namespace

void HyperGrid::validate() const {
    if (gammas.empty() || cs.empty()) fail(ErrorCode::invalid_argument, "hyperparameter grid must be non-empty");
    for (double g : gammas)
        if (!(g > 0.0)) fail(ErrorCode::invalid_argument, "grid gammas must be positive");
    for (double c : cs)
        if (!(c > 0.0)) fail(ErrorCode::invalid_argument, "grid C values must be positive");
}

void CvOptions::validate() const {
    if (folds < 2) fail(ErrorCode::invalid_argument, "need at least 2 folds");
    if (inner_folds < 2) fail(ErrorCode::invalid_argument, "need at least 2 inner folds");
    if (!(strategy.frac > 0.0 && strategy.frac <= 1.0))
        fail(ErrorCode::invalid_argument, "candidate fraction must lie in (0, 1]");
    strategy.bound.validate();
    if (bts_runs < 1 || dag_orders < 1) fail(ErrorCode::invalid_argument, "run counts must be positive");
    if (!(tolerance > 0.0) || max_passes < 1) fail(ErrorCode::invalid_argument, "invalid solver settings");
    grid.validate();
}

bool MethodResult::complete() const {
    return !folds.empty() && std::all_of(folds.begin(), folds.end(), [](const auto& f) { return f.ok; });
}

namespace {
template <class Get>
double mean_over_ok(const std::vector<FoldResult>& folds, Get get) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : folds)
        if (f.ok) sum += get(f), ++n;
    return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}
}  // namespace

double MethodResult::mean_accuracy() const { return mean_over_ok(folds, [](const auto& f) { return f.accuracy; }); }

double MethodResult::stddev_accuracy() const {
    const double mu = mean_accuracy();
    double ss = 0.0;
    std::size_t n = 0;
    for (const auto& f : folds)
        if (f.ok) ss += (f.accuracy - mu) * (f.accuracy - mu), ++n;
    return n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

double MethodResult::mean_decisions() const {
    // Weighted by fold size so the figure is a per-example average.
    double sum = 0.0, n = 0.0;
    for (const auto& f : folds)
        if (f.ok) sum += f.mean_decisions * static_cast<double>(f.test_size), n += static_cast<double>(f.test_size);
    return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

double MethodResult::train_seconds() const { return mean_over_ok(folds, [](const auto& f) { return f.train_seconds; }); }
double MethodResult::classify_seconds() const {
    return mean_over_ok(folds, [](const auto& f) { return f.classify_seconds; });
}

std::size_t EvaluationReport::failed_cells() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c.complete(); }));
}

const MethodResult* EvaluationReport::find(std::string_view dataset, Strategy method) const {
    for (const auto& c : cells)
        if (c.dataset == dataset && c.method == method) return &c;
    return nullptr;
}

std::vector<MethodResult> run_cv(const Dataset& ds, const std::string& name, std::span<const Strategy> methods,
                                 const CvOptions& opt) {
    opt.validate();
    if (ds.normalization()) fail(ErrorCode::invalid_argument, "run_cv expects raw features");
    const auto plan = make_folds(ds, opt.folds, derive_seed(opt.seed, {ds.content_hash(), 0}));
    const std::uint64_t dkey = ds.content_hash();

    std::vector<MethodResult> results(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) results[m] = {name, methods[m], ds.num_classes(), {}};

    for (int f = 0; f < opt.folds; ++f) {
        const Dataset train_raw = ds.subset(plan.train_indices(f));
        const Normalization norm = fit_normalization(train_raw);
        const Dataset train = apply_normalization(train_raw, norm);
        const Dataset test = apply_normalization(ds.subset(plan.test_indices(f)), norm);
        const std::uint64_t fold_seed = derive_seed(opt.seed, {dkey, static_cast<std::uint64_t>(f)});

        std::vector<FoldResult> fold(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m) {
            fold[m].fold = f;
            fold[m].test_size = test.size();
        }
        std::vector<Selection> chosen;
        try {
            chosen = select_many(train, methods, opt, fold_seed);
        } catch (const Error& e) {
            for (auto& r : fold) r.error = e.what();
        }

        if (!chosen.empty()) {
            if (train.present_classes().size() < 2) {
                for (auto& r : fold) r.error = "training split has fewer than two classes";
                chosen.clear();
            }
        }
        if (!chosen.empty()) {
            const auto points = grid_points(opt.grid);
            std::map<double, std::unique_ptr<TrainingData>> tables;
            struct PoolEntry {
                std::unique_ptr<OvoPool> pool;
                std::unique_ptr<NodeCache> nodes;
                double seconds = 0.0;
            };
            std::map<std::pair<double, double>, PoolEntry> pools;
            for (std::size_t m = 0; m < methods.size(); ++m) {
                const auto& sel = chosen[m];
                auto& r = fold[m];
                r.gamma = sel.gamma;
                r.c_reg = sel.c_reg;
                std::size_t p_index = 0;
                for (std::size_t p = 0; p < points.size(); ++p)
                    if (points[p].gamma == sel.gamma && points[p].c == sel.c_reg) p_index = p;
                try {
                    auto& td = tables[sel.gamma];
                    if (!td) td = std::make_unique<TrainingData>(train, KernelSpec::rbf(sel.gamma));
                    const auto cfg = make_config(sel.gamma, sel.c_reg, opt);
                    NodeCache* nodes = nullptr;
                    double pool_seconds = 0.0;
                    if (needs_pool(methods[m])) {
                        auto& entry = pools[{sel.gamma, sel.c_reg}];
                        if (!entry.pool) {
                            Stopwatch clock(opt.record_timing);
                            entry.pool = std::make_unique<OvoPool>(train_ovo_pool(*td, cfg));
                            entry.seconds = clock.seconds();
                            entry.nodes = std::make_unique<NodeCache>(*td, cfg, *entry.pool);
                        }
                        nodes = entry.nodes.get();
                        pool_seconds = entry.seconds;
                    }
                    const auto run_seed =
                        derive_seed(fold_seed, {static_cast<std::uint64_t>(methods[m]), p_index, kOuterTag});
                    const auto s = score_method(*td, methods[m], cfg, opt, nodes, pool_seconds, test, run_seed);
                    const double n = static_cast<double>(std::max<std::size_t>(s.tested, 1));
                    r.accuracy = s.correct / n;
                    r.mean_decisions = s.decisions / n;
                    r.train_seconds = s.train_seconds;
                    r.classify_seconds = s.classify_seconds;
                    r.ok = true;
                } catch (const Error& e) {
                    r.error = e.what();
                }
            }
        }
        for (std::size_t m = 0; m < methods.size(); ++m) results[m].folds.push_back(std::move(fold[m]));
    }
    return results;
}

MethodResult run_cv(const Dataset& ds, const std::string& name, Strategy method, const CvOptions& options) {
    const Strategy one[] = {method};
    return run_cv(ds, name, one, options).front();
}

Selection select_hyperparameters(const Dataset& train, Strategy method, const CvOptions& options, std::uint64_t seed) {
    options.validate();
    const Strategy one[] = {method};
    return select_many(train, one, options, seed).front();
}

ModelBundle train_bundle(const Dataset& ds, Strategy method, const CvOptions& options) {
    options.validate();
    if (ds.normalization()) fail(ErrorCode::invalid_argument, "train_bundle expects raw features");
    const Normalization norm = fit_normalization(ds);
    const Dataset train = apply_normalization(ds, norm);
    if (train.present_classes().size() < 2) fail(ErrorCode::build_failure, "need at least two classes");
    const std::uint64_t seed = derive_seed(options.seed, {ds.content_hash(), kOuterTag});
    const auto sel = select_hyperparameters(train, method, options, seed);
    const TrainingData td(train, KernelSpec::rbf(sel.gamma));
    auto strategy = options.strategy;
    strategy.seed = derive_seed(seed, {static_cast<std::uint64_t>(method)});
    return {train_multiclass(td, method, make_config(sel.gamma, sel.c_reg, options), strategy), ds.class_names(), norm};
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, WilcoxonMode mode) {
    if (a.size() != b.size()) fail(ErrorCode::invalid_argument, "paired samples must have equal length");
    WilcoxonResult r;
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d > 0) ++r.win;
        else if (d < 0) ++r.lose;
        else ++r.draw;
        if (d != 0) diffs.push_back(d);
    }
    const std::size_t n = diffs.size();
    r.nonzero = n;

    // Average ranks of |d|, held doubled so ties stay integral.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
    std::vector<std::size_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = i + j + 2;  // 2 * mean of ranks i+1..j+1
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    std::size_t w2 = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (diffs[i] > 0) w2 += rank2[i];
    r.w_plus = static_cast<double>(w2) / 2.0;

    if (n < 5) return r;
    const bool exact = mode == WilcoxonMode::exact || (mode == WilcoxonMode::automatic && n <= 25);
    r.exact = exact;
    if (exact) {
        // Null distribution of the doubled positive rank sum over all 2^n sign assignments.
        std::size_t total2 = 0;
        for (auto v : rank2) total2 += v;
        std::vector<double> ways(total2 + 1, 0.0);
        ways[0] = 1.0;
        std::size_t reach = 0;
        for (auto v : rank2) {
            reach += v;
            for (std::size_t s = reach; s >= v; --s) {
                ways[s] += ways[s - v];
                if (s == v) break;
            }
        }
        const double all = std::ldexp(1.0, static_cast<int>(n));
        double lower = 0.0, upper = 0.0;
        for (std::size_t s = 0; s <= total2; ++s) {
            if (s <= w2) lower += ways[s];
            if (s >= w2) upper += ways[s];
        }
        r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    } else {
        const double nn = static_cast<double>(n);
        const double mu = nn * (nn + 1.0) / 4.0;
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, std::abs(r.w_plus - mu) - 0.5) / std::sqrt(var);
        r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
    return r;
}

void compute_comparisons(EvaluationReport& report) {
    report.comparisons.clear();
    for (std::size_t x = 0; x < report.methods.size(); ++x)
        for (std::size_t y = x + 1; y < report.methods.size(); ++y) {
            std::vector<double> a, b;
            for (const auto& d : report.datasets) {
                const auto* ca = report.find(d.name, report.methods[x]);
                const auto* cb = report.find(d.name, report.methods[y]);
                if (!ca || !cb || !ca->complete() || !cb->complete()) continue;
                a.push_back(ca->mean_accuracy());
                b.push_back(cb->mean_accuracy());
            }
            report.comparisons.push_back({report.methods[x], report.methods[y], wilcoxon_signed_rank(a, b)});
        }
}

}  // namespace svmtree
