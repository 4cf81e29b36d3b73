#include "svmtree/svm_binary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "svmtree/error.hpp"

namespace svmtree {

namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kRowCacheBytes = std::size_t{256} << 20;

// Kernel rows of the local subproblem, LRU-cached. Rows come from the shared
// table (gathered) or are computed directly when the table is not dense.
class RowCache {
public:
    RowCache(const KernelTable& table, std::span<const std::size_t> index)
        : table_(table), index_(index.begin(), index.end()) {
        const std::size_t n = index_.size();
        capacity_ = std::max<std::size_t>(2, kRowCacheBytes / (std::max<std::size_t>(n, 1) * sizeof(double)));
        capacity_ = std::min(capacity_, n);
        diag_.resize(n);
        for (std::size_t i = 0; i < n; ++i) diag_[i] = table_.at(index_[i], index_[i]);
    }

    double diag(std::size_t i) const { return diag_[i]; }

    const double* row(std::size_t i) {
        if (auto it = slots_.find(i); it != slots_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.pos);
            return it->second.values.data();
        }
        std::vector<double> values;
        if (slots_.size() >= capacity_) {
            const std::size_t victim = lru_.back();
            lru_.pop_back();
            auto node = slots_.extract(victim);
            values = std::move(node.mapped().values);
        }
        values.resize(index_.size());
        const std::size_t gi = index_[i];
        for (std::size_t t = 0; t < index_.size(); ++t) values[t] = table_.at(gi, index_[t]);
        lru_.push_front(i);
        auto& slot = slots_[i];
        slot.values = std::move(values);
        slot.pos = lru_.begin();
        return slot.values.data();
    }

private:
    struct Slot {
        std::vector<double> values;
        std::list<std::size_t>::iterator pos;
    };
    const KernelTable& table_;
    std::vector<std::size_t> index_;
    std::vector<double> diag_;
    std::size_t capacity_ = 2;
    std::unordered_map<std::size_t, Slot> slots_;
    std::list<std::size_t> lru_;
};

double dual_value(const std::vector<double>& alpha, const std::vector<double>& grad) {
    double w = 0.0;
    for (std::size_t t = 0; t < alpha.size(); ++t) w += alpha[t] * (1.0 - grad[t]);
    return 0.5 * w;
}

}  // namespace

double kernel_radius(const KernelTable& table, std::span<const std::size_t> idx) {
    const double m = static_cast<double>(idx.size());
    std::vector<double> row_mean(idx.size(), 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        double acc = 0.0;
        if (const double* row = table.row(idx[a])) {
            for (auto b : idx) acc += row[b];
        } else {
            for (auto b : idx) acc += table.at(idx[a], b);
        }
        row_mean[a] = acc / m;
        total += acc;
    }
    const double grand_mean = total / (m * m);
    double r2 = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a)
        r2 = std::max(r2, table.at(idx[a], idx[a]) - 2.0 * row_mean[a] + grand_mean);
    return std::sqrt(std::max(0.0, r2));
}

namespace {

void set_margin(ModelStats& st, double w2, double alpha_sum) {
    st.dual_objective = alpha_sum - 0.5 * w2;
    if (!(w2 > 0.0) || !std::isfinite(w2)) {
        st.degenerate = true;
        st.margin_delta = 0.0;
    } else {
        st.margin_delta = 1.0 / std::sqrt(w2);
    }
}

std::vector<FeatureRef> concat(std::span<const FeatureRef> a, std::span<const FeatureRef> b) {
    std::vector<FeatureRef> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    if (!(c_reg > 0.0 && std::isfinite(c_reg))) fail(ErrorCode::invalid_argument, "C must be positive");
    if (!(tolerance > 0.0)) fail(ErrorCode::invalid_argument, "tolerance must be positive");
    if (max_passes <= 0) fail(ErrorCode::invalid_argument, "max_passes must be positive");
    kernel.validate();
}

BinaryModel train(const KernelTable& table, std::span<const std::size_t> pos, std::span<const std::size_t> neg,
                  const TrainConfig& cfg, SolverTrace* trace, std::optional<double> radius) {
    cfg.validate();
    if (pos.empty() || neg.empty()) fail(ErrorCode::invalid_argument, "binary training needs both classes");
    if (!(table.kernel() == cfg.kernel)) fail(ErrorCode::invalid_argument, "kernel table built with another kernel");

    const std::size_t n = pos.size() + neg.size();
    std::vector<std::size_t> index(pos.begin(), pos.end());
    index.insert(index.end(), neg.begin(), neg.end());
    std::vector<double> y(n, 1.0);
    std::fill(y.begin() + static_cast<std::ptrdiff_t>(pos.size()), y.end(), -1.0);

    const std::size_t dim = table.point(index.front()).size();
    for (auto gi : index)
        if (table.point(gi).size() != dim) fail(ErrorCode::dimension_mismatch, "training points differ in dimension");

    RowCache rows(table, index);
    const double C = cfg.c_reg;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a

    const std::size_t max_iter = static_cast<std::size_t>(cfg.max_passes) * std::max<std::size_t>(n, 100);
    std::size_t iter = 0;
    bool converged = false;
    if (trace) trace->dual_objective.push_back(0.0);

    while (iter < max_iter) {
        // Maximal violating pair: i maximizes -y*G over I_up, j minimizes it over I_low.
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            const bool up = y[t] > 0 ? alpha[t] < C : alpha[t] > 0;
            const bool low = y[t] > 0 ? alpha[t] > 0 : alpha[t] < C;
            if (up && v > g_max) g_max = v, i = t;
            if (low && v < g_min) g_min = v, j = t;
        }
        if (i == n || j == n || g_max - g_min < cfg.tolerance) {
            converged = true;
            break;
        }
        ++iter;

        const double* ki = rows.row(i);
        const double* kj = rows.row(j);
        const double qij = y[i] * y[j] * ki[j];
        const double old_ai = alpha[i], old_aj = alpha[j];

        if (y[i] != y[j]) {
            double quad = rows.diag(i) + rows.diag(j) + 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
            } else if (alpha[i] < 0) {
                alpha[i] = 0, alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
            } else if (alpha[j] > C) {
                alpha[j] = C, alpha[i] = C + diff;
            }
        } else {
            double quad = rows.diag(i) + rows.diag(j) - 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) alpha[i] = C, alpha[j] = sum - C;
            } else if (alpha[j] < 0) {
                alpha[j] = 0, alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) alpha[j] = C, alpha[i] = sum - C;
            } else if (alpha[i] < 0) {
                alpha[i] = 0, alpha[j] = sum;
            }
        }

        const double dai = (alpha[i] - old_ai) * y[i];
        const double daj = (alpha[j] - old_aj) * y[j];
        for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki[t] * dai + kj[t] * daj);
        if (trace) trace->dual_objective.push_back(dual_value(alpha, grad));
    }

    // Bias from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= C) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;

    BinaryModel model;
    model.kernel = cfg.kernel;
    model.dim = dim;
    model.tolerance = cfg.tolerance;
    model.bias = -rho;
    model.converged = converged;
    model.iterations = iter;
    model.table_id = table.id();
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] <= 0) continue;
        const auto p = table.point(index[t]);
        model.support_vectors.emplace_back(p.begin(), p.end());
        model.dual_coefs.push_back(alpha[t] * y[t]);
        model.table_index.push_back(index[t]);
    }

    // Statistics straight from the solver state: y_t f(x_t) = G_t + 1 + y_t b
    // and ||w||^2 = sum_t alpha_t (G_t + 1).
    ModelStats& st = model.stats;
    st.m = n;
    double w2 = 0.0, alpha_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (grad[t] + 1.0 + y[t] * model.bias < 1.0 - cfg.tolerance) ++st.l;
        w2 += alpha[t] * (grad[t] + 1.0);
        alpha_sum += alpha[t];
    }
    set_margin(st, w2, alpha_sum);
    st.radius = radius ? *radius : kernel_radius(table, index);
    return model;
}

BinaryModel train(std::span<const FeatureRef> pos, std::span<const FeatureRef> neg, const TrainConfig& cfg) {
    cfg.validate();
    const KernelTable table(concat(pos, neg), cfg.kernel);
    std::vector<std::size_t> pi(pos.size()), ni(neg.size());
    for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = i;
    for (std::size_t i = 0; i < ni.size(); ++i) ni[i] = pos.size() + i;
    BinaryModel model = train(table, pi, ni, cfg);
    model.table_id = 0;
    model.table_index.clear();
    return model;
}

double decision(const BinaryModel& model, FeatureRef x) {
    if (x.size() != model.dim)
        fail(ErrorCode::dimension_mismatch, "model expects " + std::to_string(model.dim) + " features, got " +
                                                std::to_string(x.size()));
    double f = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.size(); ++s)
        f += model.dual_coefs[s] * model.kernel(model.support_vectors[s], x);
    return f;
}

double decision(const BinaryModel& model, PointKernel& x) {
    if (model.table_id != x.table().id()) return decision(model, x.point());
    if (x.point().size() != model.dim)
        fail(ErrorCode::dimension_mismatch, "model expects " + std::to_string(model.dim) + " features, got " +
                                                std::to_string(x.point().size()));
    double f = model.bias;
    for (std::size_t s = 0; s < model.table_index.size(); ++s) f += model.dual_coefs[s] * x.at(model.table_index[s]);
    return f;
}

double decision_at(const BinaryModel& model, const KernelTable& table, std::size_t i) {
    if (model.table_id != table.id() || !table.dense()) return decision(model, table.point(i));
    double f = model.bias;
    for (std::size_t s = 0; s < model.table_index.size(); ++s) f += model.dual_coefs[s] * table.at(model.table_index[s], i);
    return f;
}

std::vector<double> decision_values(const BinaryModel& model, const KernelTable& table) {
    std::vector<double> f(table.size(), model.bias);
    if (model.table_id != table.id() || !table.dense()) {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = decision(model, table.point(i));
        return f;
    }
    // Accumulate coefficient-weighted Gram rows; the Gram matrix is symmetric.
    const std::size_t n = f.size();
    for (std::size_t s = 0; s < model.table_index.size(); ++s) {
        const double c = model.dual_coefs[s];
        const double* row = table.row(model.table_index[s]);
        for (std::size_t i = 0; i < n; ++i) f[i] += c * row[i];
    }
    return f;
}

double weight_norm_sq(const BinaryModel& model) {
    double w2 = 0.0;
    const std::size_t k = model.support_vectors.size();
    for (std::size_t s = 0; s < k; ++s) {
        w2 += model.dual_coefs[s] * model.dual_coefs[s] * model.kernel(model.support_vectors[s], model.support_vectors[s]);
        for (std::size_t t = 0; t < s; ++t)
            w2 += 2.0 * model.dual_coefs[s] * model.dual_coefs[t] *
                  model.kernel(model.support_vectors[s], model.support_vectors[t]);
    }
    return w2;
}

ModelStats compute_stats(const BinaryModel& model, const KernelTable& table, std::span<const std::size_t> pos,
                         std::span<const std::size_t> neg) {
    if (pos.empty() && neg.empty()) fail(ErrorCode::invalid_argument, "statistics need training data");
    ModelStats st;
    st.m = pos.size() + neg.size();

    const double threshold = 1.0 - model.tolerance;
    for (auto i : pos)
        if (decision_at(model, table, i) < threshold) ++st.l;
    for (auto i : neg)
        if (-decision_at(model, table, i) < threshold) ++st.l;

    double w2 = 0.0;
    if (model.table_id == table.id() && table.dense()) {
        const auto& idx = model.table_index;
        for (std::size_t s = 0; s < idx.size(); ++s) {
            double acc = 0.0;
            for (std::size_t t = 0; t < idx.size(); ++t) acc += model.dual_coefs[t] * table.at(idx[s], idx[t]);
            w2 += model.dual_coefs[s] * acc;
        }
    } else {
        w2 = weight_norm_sq(model);
    }
    double alpha_sum = 0.0;
    for (double c : model.dual_coefs) alpha_sum += std::abs(c);
    set_margin(st, w2, alpha_sum);

    std::vector<std::size_t> all(pos.begin(), pos.end());
    all.insert(all.end(), neg.begin(), neg.end());
    st.radius = kernel_radius(table, all);
    return st;
}

ModelStats compute_stats(const BinaryModel& model, std::span<const FeatureRef> pos, std::span<const FeatureRef> neg) {
    const KernelTable table(concat(pos, neg), model.kernel);
    std::vector<std::size_t> pi(pos.size()), ni(neg.size());
    for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = i;
    for (std::size_t i = 0; i < ni.size(); ++i) ni[i] = pos.size() + i;
    return compute_stats(model, table, pi, ni);
}

BinaryModel constant_model(double value, std::size_t dim) {
    BinaryModel m;
    m.kernel = KernelSpec::linear();
    m.bias = value;
    m.dim = dim;
    m.stats.degenerate = true;
    return m;
}

}  // namespace svmtree
