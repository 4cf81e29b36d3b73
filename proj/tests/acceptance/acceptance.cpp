// End-to-end acceptance suite: prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "constructions.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "svm_checks.hpp"
#include "svmtree/evaluation.hpp"
#include "svmtree/tree_builders.hpp"
#include "tree_checks.hpp"

using namespace svmtree;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        failures.push_back(what);
    }

    std::string summary() const {
        std::string s = detail.str();
        for (const auto& f : failures) s += (s.empty() ? "" : " | ") + std::string("FAILED: ") + f;
        return s;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

TrainConfig rbf(double gamma, double C) {
    TrainConfig cfg;
    cfg.kernel = KernelSpec::rbf(gamma);
    cfg.c_reg = C;
    return cfg;
}

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// 1. Exact decision counts of the pairwise and one-against-all reductions.
void decision_counts(Outcome& o) {
    const auto t0 = Clock::now();
    const auto ds = normalize(fixtures::blobs(100, 16, 8, 0.3, 5.0, 1001));
    const auto cfg = rbf(1.0, 10);
    const TrainingData data(ds, cfg.kernel);
    const auto ovo = train_ovo_pool(data, cfg);
    const auto ova = train_ova_pool(data, cfg);
    Rng rng(7);
    std::vector<int> order = data.classes();
    std::size_t bad = 0;
    for (const auto& ex : ds.examples()) {
        PointKernel px(data.table(), ex.features);
        bad += classify_ovo_maxwins(ovo, px).decisions != 4950;
        bad += classify_ova(ova, px).decisions != 100;
        shuffle(order, rng);
        bad += classify_ddag(ovo, order, ex.features).decisions != 99;
        bad += classify_adag(ovo, order, ex.features).decisions != 99;
    }
    const double elapsed = seconds_since(t0);
    o.expect(bad == 0, std::to_string(bad) + " per-example counts differ from 4950/100/99/99");
    o.expect(elapsed < 60.0, "took " + fmt(elapsed, 1) + " s");
    o.detail << "1600 examples, N=100: OVO/OVA/DDAG/ADAG counts checked per example, " << fmt(elapsed, 1) << " s";
}

Dataset load_named(const std::string& name) { return normalize(load_csv(fixtures::data_path(name))); }

// 2. IB-DTree and IBGE-DTree are proper class partitions on every dataset.
void tree_invariants(Outcome& o) {
    std::vector<std::pair<std::string, Dataset>> sets;
    for (const char* n : {"iris.csv", "wine.csv", "digits.csv"}) sets.emplace_back(n, load_named(n));
    sets.emplace_back("blobs-100", normalize(fixtures::blobs(100, 10, 10, 0.5, 10.0, 3)));
    sets.emplace_back("ring-12", normalize(fixtures::ring(12, 20, 0.35, 4)));
    std::size_t audited = 0;
    for (const auto& [name, ds] : sets) {
        const auto cfg = rbf(name == "digits.csv" ? 0.01 : 1.0, 10);
        const TrainingData data(ds, cfg.kernel);
        const auto pool = train_ovo_pool(data, cfg);
        NodeCache cache(data, cfg, pool);
        for (const auto& tree : {build_ib_dtree(cache), build_ibge_dtree(cache)}) {
            const auto a = tree_checks::audit(tree, data.classes());
            o.expect(a.error.empty(), name + ": " + a.error);
            ++audited;
        }
    }
    o.detail << audited << " trees: N leaves, N-1 internal nodes, one leaf per class, children partition";
}

// 3. Mean decisions of the entropy trees on 100 classes.
void tree_speedup(Outcome& o) {
    const auto t0 = Clock::now();
    const auto all = normalize(fixtures::blobs(100, 15, 10, 0.5, 10.0, 2024));
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < all.size(); ++i) (i < 10 * 100 ? train_idx : test_idx).push_back(i);
    const auto train = all.subset(train_idx);
    const auto test = all.subset(test_idx);
    const auto cfg = rbf(1.0, 10);
    const TrainingData data(train, cfg.kernel);
    const auto pool = train_ovo_pool(data, cfg);
    NodeCache cache(data, cfg, pool);
    const std::pair<const char*, DecisionTree> trees[] = {{"ib_dtree", build_ib_dtree(cache)},
                                                          {"ibge_dtree", build_ibge_dtree(cache)}};
    for (const auto& [name, tree] : trees) {
        double decisions = 0, correct = 0;
        for (const auto& ex : test.examples()) {
            PointKernel px(data.table(), ex.features);
            const auto p = classify_tree(tree, px);
            decisions += static_cast<double>(p.decisions);
            correct += p.class_id == ex.label;
        }
        const double mean = decisions / static_cast<double>(test.size());
        o.expect(mean >= 7.0 && mean <= 12.0, std::string(name) + " mean decisions " + fmt(mean) + " outside [7, 12]");
        o.detail << name << " " << fmt(mean) << " (acc " << fmt(100 * correct / static_cast<double>(test.size()), 1)
                 << "%), ";
    }
    // Fewest decisions any 100-leaf tree can average over uniformly spread classes.
    const std::size_t n = 100, d = 6, extra = n - (std::size_t{1} << d);
    const double floor_avg = static_cast<double>(d * (n - 2 * extra) + (d + 1) * 2 * extra) / static_cast<double>(n);
    const double elapsed = seconds_since(t0);
    o.expect(elapsed < 600.0, "took " + fmt(elapsed, 1) + " s");
    o.detail << "balanced optimum " << fmt(floor_avg, 2) << ", " << fmt(elapsed, 1) << " s";
}

// 4. Entropy against brute-force evaluation.
void entropy_oracle(Outcome& o) {
    Rng rng(44);
    double worst = 0;
    int checked = 0;
    while (checked < 1000) {
        const auto k = 1 + uniform_below(rng, 10);
        std::vector<std::pair<std::size_t, std::size_t>> raw;
        SplitCounts s;
        for (std::size_t c = 0; c < k; ++c) {
            // Zero counts, empty classes and empty sides all occur.
            const auto mode = uniform_below(rng, 6);
            const std::size_t p = mode == 0 || mode == 2 ? 0 : uniform_below(rng, 200);
            const std::size_t n = mode == 1 || mode == 2 ? 0 : uniform_below(rng, 200);
            raw.emplace_back(p, n);
            s.classes.push_back({static_cast<int>(c + 1), p, n});
        }
        if (checked % 10 == 0)
            for (auto& c : s.classes) c.neg = 0;
        for (std::size_t c = 0; c < k; ++c) raw[c].second = s.classes[c].neg;
        if (s.total() == 0) continue;
        const double ours = entropy(s), ref = oracle::entropy(raw);
        worst = std::max(worst, std::abs(ours - ref));
        ++checked;
    }
    o.expect(worst <= 1e-12, "max deviation " + std::to_string(worst));
    o.detail << "1000 random splits, max |diff| " << worst;
}

// 5. Bound against hand evaluation, plus monotonicity.
void bound_formula(Outcome& o) {
    Rng rng(55);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        ModelStats st;
        st.m = 1 + uniform_below(rng, 5000);
        st.l = uniform_below(rng, st.m + 1);
        st.radius = uniform_unit(rng) * std::sqrt(2.0);
        st.margin_delta = 1e-3 + uniform_unit(rng) * 3;
        const GenErrorParams params{0.01 + uniform_unit(rng), 1e-4 + uniform_unit(rng) * 0.9};
        const double ours = generalization_error_bound(st, params);
        const double ref = oracle::bound(static_cast<double>(st.m), static_cast<double>(st.l), st.radius,
                                         st.margin_delta, params.c_const, params.delta);
        worst = std::max(worst, std::abs(ours - ref) / std::max(1.0, std::abs(ref)));
    }
    o.expect(worst <= 1e-12, "max relative deviation " + std::to_string(worst));
    std::size_t violations = 0;
    for (int t = 0; t < 10000; ++t) {
        ModelStats a;
        a.m = 2 + uniform_below(rng, 5000);
        a.l = uniform_below(rng, a.m);
        a.radius = 0.01 + uniform_unit(rng) * 1.4;
        a.margin_delta = 0.01 + uniform_unit(rng) * 3;
        ModelStats more_l = a;
        more_l.l += 1 + uniform_below(rng, a.m - a.l);
        ModelStats wider = a;
        if (t % 2) wider.radius *= 1.0 + uniform_unit(rng) + 1e-6;
        else wider.margin_delta /= 1.0 + uniform_unit(rng) + 1e-6;
        const double b = generalization_error_bound(a);
        violations += !(generalization_error_bound(more_l) > b);
        violations += !(generalization_error_bound(wider) > b);
    }
    o.expect(violations == 0, std::to_string(violations) + " monotonicity violations");
    o.detail << "100 closed-form checks (max rel diff " << worst << "), 10000 monotone pairs in l and R/Delta";
}

// 6. Class grouping on the two hand constructions.
void grouping_fidelity(Outcome& o) {
    TrainConfig cfg;
    cfg.kernel = KernelSpec::linear();
    cfg.c_reg = 10;
    for (const auto& layout : {constructions::two_against_one(), constructions::three_against_three()}) {
        const TrainingData data(layout.data, cfg.kernel);
        const auto g = group_by_majority(layout.h, layout.classes, data, cfg);
        const auto show = [](const std::vector<int>& v) {
            std::string s = "{";
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
            return s + "}";
        };
        o.expect(g.pos_classes == layout.expected_pos && g.neg_classes == layout.expected_neg,
                 "got P=" + show(g.pos_classes) + " N=" + show(g.neg_classes));
        o.detail << (o.detail.tellp() > 0 ? "; " : "") << "P=" << show(g.pos_classes) << " N=" << show(g.neg_classes);
    }
}

// 7. SMO optimality.
void smo_correctness(Outcome& o) {
    double worst_kkt = 0, worst_dual = 0, worst_radius = 0;
    int qp_checked = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const std::size_t m = t < 20 ? 6 + t % 15 : 20 + (t * 37) % 181;
        const auto p = svm_checks::random_problem(5000 + t, m, 2 + t % 4, 0.5 + 0.1 * static_cast<double>(t % 10));
        TrainConfig cfg = t % 5 == 4 ? TrainConfig{} : rbf(0.1 * static_cast<double>(1 + t % 7), 1.0);
        if (t % 5 == 4) cfg.kernel = KernelSpec::linear();
        cfg.c_reg = t % 3 == 0 ? 0.5 : (t % 3 == 1 ? 5.0 : 50.0);
        const KernelTable table(p.refs(), cfg.kernel);
        const auto model = train(table, p.with_label(1), p.with_label(-1), cfg);
        o.expect(model.converged, "problem " + std::to_string(t) + " did not converge");
        worst_kkt = std::max(worst_kkt, svm_checks::kkt_violation(model, p, cfg.c_reg));
        if (cfg.kernel.kind == KernelKind::rbf) worst_radius = std::max(worst_radius, model.stats.radius);
        if (m <= 20) {
            const double ref = oracle::svm_dual_optimum(svm_checks::gram(p, cfg.kernel), p.y, cfg.c_reg);
            worst_dual = std::max(worst_dual, std::abs(model.stats.dual_objective - ref) / std::max(1e-12, std::abs(ref)));
            ++qp_checked;
        }
    }
    o.expect(worst_kkt <= 1e-3 + 1e-12, "KKT violation " + std::to_string(worst_kkt));
    o.expect(worst_dual <= 1e-4, "dual objective off by " + std::to_string(worst_dual));
    o.expect(worst_radius <= std::sqrt(2.0), "RBF radius " + std::to_string(worst_radius));
    o.detail << "50 problems: max KKT violation " << worst_kkt << ", " << qp_checked
                 << " QP cross-checks max rel diff " << worst_dual << ", max RBF radius " << fmt(worst_radius, 4);
}

// 8. Accuracy ordering on three small real datasets.
void accuracy_corridor(Outcome& o) {
    const auto t0 = Clock::now();
    const Strategy methods[] = {Strategy::ovo, Strategy::ibge_dtree, Strategy::bts_g};
    double ibge_sum = 0, bts_sum = 0;
    for (const char* name : {"iris.csv", "wine.csv", "digits.csv"}) {
        const auto ds = load_csv(fixtures::data_path(name));
        const auto cells = run_cv(ds, name, methods, CvOptions{});
        for (const auto& c : cells) o.expect(c.complete(), std::string(name) + ": incomplete cell");
        const double ovo = 100 * cells[0].mean_accuracy(), ibge = 100 * cells[1].mean_accuracy(),
                     bts = 100 * cells[2].mean_accuracy();
        o.expect(std::abs(ibge - ovo) <= 3.0, std::string(name) + ": IBGE " + fmt(ibge, 2) + " vs OVO " + fmt(ovo, 2));
        ibge_sum += ibge;
        bts_sum += bts;
        o.detail << name << " ovo/ibge/bts " << fmt(ovo, 2) << "/" << fmt(ibge, 2) << "/" << fmt(bts, 2) << "; ";
    }
    o.expect(bts_sum / 3 <= ibge_sum / 3 + 1.0,
             "BTS-G mean " + fmt(bts_sum / 3, 2) + " exceeds IBGE mean " + fmt(ibge_sum / 3, 2) + " + 1");
    const double elapsed = seconds_since(t0);
    o.expect(elapsed < 1800.0, "took " + fmt(elapsed, 0) + " s");
    o.detail << fmt(elapsed, 0) << " s";
}

// 9. Wilcoxon p-values.
void wilcoxon(Outcome& o) {
    Rng rng(99);
    double worst = 0;
    int checked = 0;
    for (int t = 0; t < 400; ++t) {
        const std::size_t n = 5 + uniform_below(rng, 8);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = 0.5;
            a[i] = 0.5 + 0.01 * static_cast<double>(static_cast<int>(uniform_below(rng, 11)) - 5);
        }
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
        const auto r = wilcoxon_signed_rank(a, b, WilcoxonMode::exact);
        if (!r.p_value) continue;
        worst = std::max(worst, std::abs(*r.p_value - oracle::wilcoxon_enumerated(d)));
        ++checked;
    }
    o.expect(worst <= 1e-12, "enumeration mismatch " + std::to_string(worst));
    const double six[] = {1, 2, 3, 4, 5, 6}, zero[] = {0, 0, 0, 0, 0, 0};
    const auto r6 = wilcoxon_signed_rank(six, zero);
    o.expect(r6.p_value && std::abs(*r6.p_value - 0.03125) < 1e-15, "six positive differences");
    std::vector<double> wins(20), base(20, 0.8);
    for (std::size_t i = 0; i < 20; ++i) wins[i] = 0.81 + 0.005 * static_cast<double>(i);
    const auto r20 = wilcoxon_signed_rank(wins, base);
    o.expect(r20.win == 20 && r20.lose == 0 && r20.draw == 0 && r20.p_value && *r20.p_value < 1e-4,
             "20-0-0 case");
    o.detail << checked << " exact p-values vs enumeration (max diff " << worst << "), six positive p = "
             << r6.p_value.value_or(NAN) << ", 20-0-0 p = " << r20.p_value.value_or(NAN);
}

// 10. Byte-identical reports.
void determinism(Outcome& o) {
    CvOptions opt;
    opt.folds = 5;
    opt.grid.gammas = {0.01, 0.1, 1};
    opt.grid.cs = {1, 10, 100};
    opt.dag_orders = 200;
    opt.seed = 17;
    auto benchmark = [&](std::span<const Strategy> methods) {
        EvaluationReport r;
        r.options = opt;
        r.methods.assign(methods.begin(), methods.end());
        for (const char* name : {"iris.csv", "wine.csv"}) {
            const auto ds = load_csv(fixtures::data_path(name));
            auto cells = run_cv(ds, name, methods, opt);
            r.cells.insert(r.cells.end(), cells.begin(), cells.end());
        }
        return r;
    };
    const auto first = emit_report(benchmark(kAllStrategies), ReportFormat::csv);
    const auto second = emit_report(benchmark(kAllStrategies), ReportFormat::csv);
    o.expect(first == second, "two identical runs differ");
    // Each method alone must reproduce its rows of the joint run.
    EvaluationReport combined;
    combined.options = opt;
    combined.methods.assign(kAllStrategies.begin(), kAllStrategies.end());
    for (const char* name : {"iris.csv", "wine.csv"})
        for (auto m : kAllStrategies) {
            const auto ds = load_csv(fixtures::data_path(name));
            combined.cells.push_back(run_cv(ds, name, m, opt));
        }
    o.expect(emit_report(combined, ReportFormat::csv) == first, "single-method runs differ from the joint run");
    std::size_t rows = 0;
    for (char c : first) rows += c == '\n';
    o.detail << "2 runs x " << rows - 1 << " CSV rows compared byte for byte, plus per-method reruns";
}

}  // namespace

// Optional arguments select criteria by number; by default all run.
int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"decision-count exactness", decision_counts},
        {"tree structural invariants", tree_invariants},
        {"tree decision speedup", tree_speedup},
        {"entropy oracle equivalence", entropy_oracle},
        {"generalization-bound formula", bound_formula},
        {"class-grouping fidelity", grouping_fidelity},
        {"SMO correctness", smo_correctness},
        {"desk-scale accuracy corridor", accuracy_corridor},
        {"Wilcoxon test correctness", wilcoxon},
        {"determinism", determinism},
    };
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const auto k = std::strtoul(argv[a], nullptr, 10);
        if (k >= 1 && k <= criteria.size()) selected[k - 1] = true;
    }
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) continue;
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.summary().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
