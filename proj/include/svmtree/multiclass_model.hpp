#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svmtree/baselines.hpp"
#include "svmtree/dataset.hpp"
#include "svmtree/tree_builders.hpp"

namespace svmtree {

enum class Strategy { ovo, ova, ddag, adag, bts_g, cbts_g, ib_dtree, ibge_dtree };

inline constexpr std::array<Strategy, 8> kAllStrategies = {
    Strategy::ova,    Strategy::ovo,    Strategy::ddag,     Strategy::adag,
    Strategy::bts_g,  Strategy::cbts_g, Strategy::ib_dtree, Strategy::ibge_dtree,
};

std::string_view strategy_name(Strategy s);
// Throws unknown_strategy.
Strategy parse_strategy(std::string_view name);
bool is_tree_strategy(Strategy s);

struct StrategyOptions {
    double frac = 0.2;  // IBGE-DTree shortlist fraction
    GenErrorParams bound;
    std::uint64_t seed = 0;  // BTS-G node selection
};

// DDAG/ADAG keep the whole OVO pool plus the class order used at prediction.
struct DagModel {
    OvoPool pool;
    std::vector<int> order;
};

struct MulticlassModel {
    Strategy strategy = Strategy::ovo;
    TrainConfig config;
    std::variant<OvoPool, OvaPool, DagModel, DecisionTree> body;
};

// pool, when given, must be the OVO pool trained on data with config.
MulticlassModel train_multiclass(const TrainingData& data, Strategy strategy, const TrainConfig& config,
                                 const StrategyOptions& options = {}, const OvoPool* pool = nullptr);

Prediction predict(const MulticlassModel& model, FeatureRef x);
std::size_t feature_dim(const MulticlassModel& model);
std::vector<int> model_classes(const MulticlassModel& model);

// A deployable model: everything needed to classify raw (unnormalized) rows
// and report original labels.
struct ModelBundle {
    MulticlassModel model;
    std::vector<std::string> class_names;
    Normalization normalization;
};

Prediction predict_raw(const ModelBundle& bundle, FeatureRef raw);

std::string to_json_text(const ModelBundle& bundle);
ModelBundle bundle_from_json_text(const std::string& text);
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace svmtree
