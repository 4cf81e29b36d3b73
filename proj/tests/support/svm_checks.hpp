// Brute-force checks of trained binary SVMs against their optimality conditions.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "svmtree/kernel.hpp"
#include "svmtree/random.hpp"
#include "svmtree/svm_binary.hpp"

namespace svm_checks {

struct Problem {
    std::vector<svmtree::FeatureVector> points;
    std::vector<double> y;  // +1 / -1

    std::vector<svmtree::FeatureRef> refs() const { return {points.begin(), points.end()}; }
    std::vector<std::size_t> with_label(double label) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == label) out.push_back(i);
        return out;
    }
};

// Two overlapping Gaussian clouds; both labels are always present.
inline Problem random_problem(std::uint64_t seed, std::size_t m, std::size_t dim, double separation) {
    svmtree::Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Problem p;
    for (std::size_t i = 0; i < m; ++i) {
        const double label = i % 2 == 0 ? 1.0 : -1.0;
        svmtree::FeatureVector x(dim);
        for (auto& v : x) v = noise(rng) + label * separation / 2;
        p.points.push_back(std::move(x));
        p.y.push_back(label);
    }
    return p;
}

inline std::vector<std::vector<double>> gram(const Problem& p, const svmtree::KernelSpec& k) {
    const std::size_t n = p.points.size();
    std::vector<std::vector<double>> g(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i][j] = k(p.points[i], p.points[j]);
    return g;
}

// Multipliers per training point, recovered from a model trained on a table
// over p.points in order.
inline std::vector<double> alphas(const svmtree::BinaryModel& model, std::size_t n) {
    std::vector<double> a(n, 0.0);
    for (std::size_t s = 0; s < model.table_index.size(); ++s) a[model.table_index[s]] = std::abs(model.dual_coefs[s]);
    return a;
}

// Largest amount by which any point misses its KKT condition, with y*f from
// an explicit kernel expansion over the support vectors.
inline double kkt_violation(const svmtree::BinaryModel& model, const Problem& p, double C) {
    const auto a = alphas(model, p.points.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        double f = model.bias;
        for (std::size_t s = 0; s < model.support_vectors.size(); ++s)
            f += model.dual_coefs[s] * model.kernel(model.support_vectors[s], p.points[i]);
        const double margin = p.y[i] * f;
        const double eps = 1e-9 * C;
        if (a[i] <= eps) worst = std::max(worst, 1.0 - margin);
        else if (a[i] >= C - eps) worst = std::max(worst, margin - 1.0);
        else worst = std::max(worst, std::abs(margin - 1.0));
    }
    return worst;
}

inline double alpha_balance(const svmtree::BinaryModel& model) {
    double s = 0.0;
    for (double c : model.dual_coefs) s += c;
    return s;
}

}  // namespace svm_checks
