// Independent reference implementations used as test oracles. None of these
// share code with the library; they evaluate the defining formulas directly,
// usually by brute force.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Side-weighted class entropy in bits from raw (pos, neg) counts per class.
inline double entropy(const std::vector<std::pair<std::size_t, std::size_t>>& counts) {
    double pos = 0, neg = 0;
    for (const auto& [p, n] : counts) pos += static_cast<double>(p), neg += static_cast<double>(n);
    const double total = pos + neg;
    auto bracket = [&](bool positive, double side) {
        double acc = 0;
        for (const auto& [p, n] : counts) {
            const double c = static_cast<double>(positive ? p : n);
            if (c == 0) continue;  // the 0 * log 0 := 0 convention
            const double q = c / side;
            acc += -q * (std::log(q) / std::log(2.0));
        }
        return acc;
    };
    double h = 0;
    if (pos > 0) h += (pos / total) * bracket(true, pos);
    if (neg > 0) h += (neg / total) * bracket(false, neg);
    return h;
}

inline double bound(double m, double l, double radius, double delta_margin, double c, double delta) {
    const double ln_m = std::log(m);
    const double inner = (radius * radius) / (delta_margin * delta_margin) * ln_m * ln_m + std::log(1.0 / delta);
    return l / m + std::sqrt(c / m * inner);
}

// Maximizes sum(a) - 1/2 a'Qa, Q_ij = y_i y_j K_ij, over 0 <= a <= C,
// y'a = 0 by accelerated projected gradient. The projection onto the box
// intersected with the hyperplane is exact (bisection on the multiplier).
inline std::vector<double> project(const std::vector<double>& v, const std::vector<double>& y, double C) {
    const std::size_t n = v.size();
    auto clipped = [&](double mu, std::size_t i) { return std::clamp(v[i] - mu * y[i], 0.0, C); };
    auto residual = [&](double mu) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += y[i] * clipped(mu, i);
        return s;
    };
    double lo = -1.0, hi = 1.0;
    while (residual(lo) < 0) lo *= 2;
    while (residual(hi) > 0) hi *= 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0 ? lo : hi) = mid;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = clipped(0.5 * (lo + hi), i);
    return out;
}

inline double dual_objective(const std::vector<std::vector<double>>& K, const std::vector<double>& y,
                             const std::vector<double>& a) {
    double lin = 0, quad = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lin += a[i];
        for (std::size_t j = 0; j < a.size(); ++j) quad += a[i] * a[j] * y[i] * y[j] * K[i][j];
    }
    return lin - 0.5 * quad;
}

inline double svm_dual_optimum(const std::vector<std::vector<double>>& K, const std::vector<double>& y, double C,
                               int iterations = 200000) {
    const std::size_t n = y.size();
    double lipschitz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(K[i][j]);
        lipschitz = std::max(lipschitz, row);
    }
    const double step = 1.0 / std::max(lipschitz, 1e-12);
    std::vector<double> a(n, 0.0), z = a, prev = a;
    double t = 1;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += y[i] * y[j] * K[i][j] * z[j];
            g[i] = 1.0 - s;
        }
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] + step * g[i];
        prev = a;
        a = project(v, y, C);
        const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
        for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + (t - 1) / t_next * (a[i] - prev[i]);
        t = t_next;
    }
    return dual_objective(K, y, a);
}

// Two-sided Wilcoxon signed-rank p-value by enumerating every sign
// assignment of the (average) ranks of the non-zero differences.
inline double wilcoxon_enumerated(const std::vector<double>& diffs) {
    std::vector<double> d;
    for (double x : diffs)
        if (x != 0) d.push_back(x);
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(d[a]) < std::abs(d[b]); });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
        i = j;
    }
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0) observed += rank[i];
    std::uint64_t le = 0, ge = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) w += rank[i];
        if (w <= observed + 1e-9) ++le;
        if (w >= observed - 1e-9) ++ge;
    }
    const double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, 2 * tail);
}

}  // namespace oracle
