#pragma once

#include "json.hpp"

#include "svmtree/multiclass_model.hpp"

namespace svmtree::io {

using nlohmann::json;

json to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const json& j);
json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const json& j);
json to_json(const BinaryModel& m);
BinaryModel binary_model_from_json(const json& j);
json to_json(const DecisionTree& t);
DecisionTree tree_from_json(const json& j);
json to_json(const MulticlassModel& m);
MulticlassModel multiclass_from_json(const json& j);

}  // namespace svmtree::io
