#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "svmtree/dataset.hpp"
#include "svmtree/kernel.hpp"

namespace svmtree {

struct TrainConfig {
    double c_reg = 1.0;
    KernelSpec kernel;
    double tolerance = 1e-3;
    // Iteration budget in units of the problem size: the solver gives up after
    // max_passes * m pair updates and flags the model as unconverged.
    int max_passes = 1000;

    void validate() const;
};

// Quantities consumed by the generalization-error bound.
struct ModelStats {
    std::size_t m = 0;          // training-set size
    std::size_t l = 0;          // points with functional margin below 1
    double margin_delta = 0.0;  // 1 / ||w|| in kernel space
    double radius = 0.0;        // kernel-space radius around the data centroid
    double dual_objective = 0.0;
    bool degenerate = false;    // ||w|| == 0
};

struct BinaryModel {
    std::vector<FeatureVector> support_vectors;
    std::vector<double> dual_coefs;  // alpha_i * y_i
    double bias = 0.0;
    KernelSpec kernel;
    std::size_t dim = 0;
    double tolerance = 1e-3;
    ModelStats stats;
    bool converged = true;
    std::size_t iterations = 0;

    // Where each support vector sits in the KernelTable it was trained
    // against. Transient: never serialized, empty for stub or loaded models.
    std::uint64_t table_id = 0;
    std::vector<std::size_t> table_index;
};

// Optional per-step instrumentation of the solver.
struct SolverTrace {
    std::vector<double> dual_objective;
};

// Soft-margin C-SVM by SMO with maximal-violating-pair selection. pos are
// labeled +1, neg -1. Both must be non-empty.
BinaryModel train(std::span<const FeatureRef> pos, std::span<const FeatureRef> neg, const TrainConfig& cfg);

// Same, over points of a shared kernel table addressed by index. The table's
// kernel must equal cfg.kernel. radius, when known for this point set (it does
// not depend on the labels), skips recomputing it.
BinaryModel train(const KernelTable& table, std::span<const std::size_t> pos, std::span<const std::size_t> neg,
                  const TrainConfig& cfg, SolverTrace* trace = nullptr, std::optional<double> radius = std::nullopt);

// Largest kernel-space distance from a point of idx to the centroid of idx.
double kernel_radius(const KernelTable& table, std::span<const std::size_t> idx);

double decision(const BinaryModel& model, FeatureRef x);
// Same value as decision(model, x.point()); models trained on x.table() read
// the shared kernel row instead of recomputing it.
double decision(const BinaryModel& model, PointKernel& x);
// decision() at table point i, reusing cached kernel values when the model
// was trained on this table.
double decision_at(const BinaryModel& model, const KernelTable& table, std::size_t i);

// decision() at every point of table.
std::vector<double> decision_values(const BinaryModel& model, const KernelTable& table);

ModelStats compute_stats(const BinaryModel& model, std::span<const FeatureRef> pos, std::span<const FeatureRef> neg);
ModelStats compute_stats(const BinaryModel& model, const KernelTable& table, std::span<const std::size_t> pos,
                         std::span<const std::size_t> neg);

// Squared kernel-space norm of the weight vector.
double weight_norm_sq(const BinaryModel& model);

// Constant-decision model, useful where a classifier must be stubbed.
BinaryModel constant_model(double value, std::size_t dim);

}  // namespace svmtree
