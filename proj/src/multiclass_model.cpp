#include "svmtree/multiclass_model.hpp"

#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "svmtree/error.hpp"

namespace svmtree {

namespace {

constexpr std::string_view kNames[] = {"ovo", "ova", "ddag", "adag", "bts_g", "cbts_g", "ib_dtree", "ibge_dtree"};

constexpr std::string_view kModelFormat = "svmtree-model";
constexpr int kModelVersion = 1;

}  // namespace

std::string_view strategy_name(Strategy s) { return kNames[static_cast<int>(s)]; }

Strategy parse_strategy(std::string_view name) {
    for (int k = 0; k < 8; ++k)
        if (kNames[k] == name) return static_cast<Strategy>(k);
    fail(ErrorCode::unknown_strategy, "unknown strategy '" + std::string(name) +
                                          "' (expected ovo, ova, ddag, adag, bts_g, cbts_g, ib_dtree or ibge_dtree)");
}

bool is_tree_strategy(Strategy s) {
    return s == Strategy::bts_g || s == Strategy::cbts_g || s == Strategy::ib_dtree || s == Strategy::ibge_dtree;
}

MulticlassModel train_multiclass(const TrainingData& data, Strategy strategy, const TrainConfig& config,
                                 const StrategyOptions& options, const OvoPool* pool) {
    config.validate();
    MulticlassModel model;
    model.strategy = strategy;
    model.config = config;
    auto ovo = [&]() { return pool ? *pool : train_ovo_pool(data, config); };
    switch (strategy) {
        case Strategy::ovo: model.body = ovo(); break;
        case Strategy::ova: model.body = train_ova_pool(data, config); break;
        case Strategy::ddag:
        case Strategy::adag: model.body = DagModel{ovo(), data.classes()}; break;
        case Strategy::bts_g: model.body = build_bts_g(data, config, options.seed, pool); break;
        case Strategy::cbts_g: model.body = build_cbts_g(data, config, pool); break;
        case Strategy::ib_dtree: model.body = build_ib_dtree(data, config, pool); break;
        case Strategy::ibge_dtree:
            model.body = build_ibge_dtree(data, config, options.frac, options.bound, pool);
            break;
    }
    return model;
}

Prediction predict(const MulticlassModel& model, FeatureRef x) {
    switch (model.strategy) {
        case Strategy::ovo: return classify_ovo_maxwins(std::get<OvoPool>(model.body), x);
        case Strategy::ova: return classify_ova(std::get<OvaPool>(model.body), x);
        case Strategy::ddag: {
            const auto& dag = std::get<DagModel>(model.body);
            return classify_ddag(dag.pool, dag.order, x);
        }
        case Strategy::adag: {
            const auto& dag = std::get<DagModel>(model.body);
            return classify_adag(dag.pool, dag.order, x);
        }
        default: return classify_tree(std::get<DecisionTree>(model.body), x);
    }
}

namespace {

const BinaryModel& any_classifier(const MulticlassModel& model) {
    return std::visit(
        [](const auto& body) -> const BinaryModel& {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, OvoPool> || std::is_same_v<T, OvaPool>)
                return body.classifiers().begin()->second;
            else if constexpr (std::is_same_v<T, DagModel>)
                return body.pool.classifiers().begin()->second;
            else
                return body.nodes.front().classifier;
        },
        model.body);
}

}  // namespace

std::size_t feature_dim(const MulticlassModel& model) { return any_classifier(model).dim; }

std::vector<int> model_classes(const MulticlassModel& model) {
    return std::visit(
        [](const auto& body) -> std::vector<int> {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, DagModel>)
                return body.pool.classes();
            else if constexpr (std::is_same_v<T, DecisionTree>)
                return body.nodes.front().classes;
            else
                return body.classes();
        },
        model.body);
}

Prediction predict_raw(const ModelBundle& bundle, FeatureRef raw) {
    return predict(bundle.model, bundle.normalization.apply(raw));
}

namespace io {

json to_json(const KernelSpec& k) {
    return {{"kind", k.kind == KernelKind::rbf ? "rbf" : "linear"}, {"gamma", k.gamma}};
}

KernelSpec kernel_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "rbf" && kind != "linear") fail(ErrorCode::format, "unknown kernel kind '" + kind + "'");
    return {kind == "rbf" ? KernelKind::rbf : KernelKind::linear, j.at("gamma").get<double>()};
}

json to_json(const TrainConfig& cfg) {
    return {{"c", cfg.c_reg}, {"kernel", to_json(cfg.kernel)}, {"tolerance", cfg.tolerance},
            {"max_passes", cfg.max_passes}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.c_reg = j.at("c").get<double>();
    cfg.kernel = kernel_from_json(j.at("kernel"));
    cfg.tolerance = j.at("tolerance").get<double>();
    cfg.max_passes = j.at("max_passes").get<int>();
    return cfg;
}

json to_json(const BinaryModel& m) {
    const auto& s = m.stats;
    return {{"kernel", to_json(m.kernel)},
            {"dim", m.dim},
            {"bias", m.bias},
            {"tolerance", m.tolerance},
            {"converged", m.converged},
            {"iterations", m.iterations},
            {"dual_coefs", m.dual_coefs},
            {"support_vectors", m.support_vectors},
            {"stats",
             {{"m", s.m},
              {"l", s.l},
              {"margin_delta", s.margin_delta},
              {"radius", s.radius},
              {"dual_objective", s.dual_objective},
              {"degenerate", s.degenerate}}}};
}

BinaryModel binary_model_from_json(const json& j) {
    BinaryModel m;
    m.kernel = kernel_from_json(j.at("kernel"));
    m.dim = j.at("dim").get<std::size_t>();
    m.bias = j.at("bias").get<double>();
    m.tolerance = j.at("tolerance").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<std::vector<FeatureVector>>();
    if (m.dual_coefs.size() != m.support_vectors.size())
        fail(ErrorCode::format, "support vector and coefficient counts differ");
    for (const auto& sv : m.support_vectors)
        if (sv.size() != m.dim) fail(ErrorCode::format, "support vector dimension mismatch");
    const auto& s = j.at("stats");
    m.stats.m = s.at("m").get<std::size_t>();
    m.stats.l = s.at("l").get<std::size_t>();
    m.stats.margin_delta = s.at("margin_delta").get<double>();
    m.stats.radius = s.at("radius").get<double>();
    m.stats.dual_objective = s.at("dual_objective").get<double>();
    m.stats.degenerate = s.at("degenerate").get<bool>();
    return m;
}

json to_json(const DecisionTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        json node = {{"classes", n.classes}};
        if (n.is_leaf()) {
            node["leaf"] = n.leaf_class;
        } else {
            node["pos"] = n.pos_classes;
            node["neg"] = n.neg_classes;
            node["left"] = n.left;
            node["right"] = n.right;
            node["classifier"] = to_json(n.classifier);
        }
        nodes.push_back(std::move(node));
    }
    return {{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& j) {
    DecisionTree t;
    for (const auto& node : j.at("nodes")) {
        TreeNode n;
        n.classes = node.at("classes").get<std::vector<int>>();
        if (node.contains("leaf")) {
            n.leaf_class = node.at("leaf").get<int>();
        } else {
            n.pos_classes = node.at("pos").get<std::vector<int>>();
            n.neg_classes = node.at("neg").get<std::vector<int>>();
            n.left = node.at("left").get<int>();
            n.right = node.at("right").get<int>();
            n.classifier = binary_model_from_json(node.at("classifier"));
        }
        t.nodes.push_back(std::move(n));
    }
    t.validate();
    return t;
}

namespace {

json pair_pool_json(const OvoPool& pool) {
    json list = json::array();
    for (const auto& [key, model] : pool.classifiers())
        list.push_back({{"pos", key.first}, {"neg", key.second}, {"model", to_json(model)}});
    return {{"classes", pool.classes()}, {"classifiers", std::move(list)}};
}

OvoPool pair_pool_from_json(const json& j) {
    std::map<std::pair<int, int>, BinaryModel> models;
    for (const auto& e : j.at("classifiers"))
        models.emplace(std::pair{e.at("pos").get<int>(), e.at("neg").get<int>()}, binary_model_from_json(e.at("model")));
    return OvoPool(j.at("classes").get<std::vector<int>>(), std::move(models));
}

}  // namespace

json to_json(const MulticlassModel& m) {
    json j = {{"strategy", std::string(strategy_name(m.strategy))}, {"config", to_json(m.config)}};
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, OvoPool>) {
                j["ovo"] = pair_pool_json(body);
            } else if constexpr (std::is_same_v<T, OvaPool>) {
                json list = json::array();
                for (const auto& [c, model] : body.classifiers()) list.push_back({{"class", c}, {"model", to_json(model)}});
                j["ova"] = {{"classes", body.classes()}, {"classifiers", std::move(list)}};
            } else if constexpr (std::is_same_v<T, DagModel>) {
                j["ovo"] = pair_pool_json(body.pool);
                j["order"] = body.order;
            } else {
                j["tree"] = to_json(body);
            }
        },
        m.body);
    return j;
}

MulticlassModel multiclass_from_json(const json& j) {
    MulticlassModel m;
    m.strategy = parse_strategy(j.at("strategy").get<std::string>());
    m.config = train_config_from_json(j.at("config"));
    switch (m.strategy) {
        case Strategy::ovo: m.body = pair_pool_from_json(j.at("ovo")); break;
        case Strategy::ova: {
            std::map<int, BinaryModel> models;
            for (const auto& e : j.at("ova").at("classifiers"))
                models.emplace(e.at("class").get<int>(), binary_model_from_json(e.at("model")));
            m.body = OvaPool(j.at("ova").at("classes").get<std::vector<int>>(), std::move(models));
            break;
        }
        case Strategy::ddag:
        case Strategy::adag: m.body = DagModel{pair_pool_from_json(j.at("ovo")), j.at("order").get<std::vector<int>>()}; break;
        default: m.body = tree_from_json(j.at("tree")); break;
    }
    return m;
}

}  // namespace io

std::string to_json_text(const ModelBundle& bundle) {
    io::json ranges = io::json::array();
    for (const auto& r : bundle.normalization.ranges()) ranges.push_back({r.min, r.max});
    const io::json j = {{"format", kModelFormat},
                        {"version", kModelVersion},
                        {"class_names", bundle.class_names},
                        {"normalization", std::move(ranges)},
                        {"model", io::to_json(bundle.model)}};
    return j.dump() + "\n";
}

ModelBundle bundle_from_json_text(const std::string& text) {
    try {
        const auto j = io::json::parse(text);
        if (j.at("format").get<std::string>() != kModelFormat) fail(ErrorCode::format, "not a model file");
        if (j.at("version").get<int>() != kModelVersion)
            fail(ErrorCode::format, "unsupported model version " + std::to_string(j.at("version").get<int>()));
        ModelBundle b;
        b.class_names = j.at("class_names").get<std::vector<std::string>>();
        std::vector<FeatureRange> ranges;
        for (const auto& r : j.at("normalization")) ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
        b.normalization = Normalization(std::move(ranges));
        b.model = io::multiclass_from_json(j.at("model"));
        if (feature_dim(b.model) != b.normalization.dim())
            fail(ErrorCode::format, "normalization and model dimensions differ");
        for (int c : model_classes(b.model))
            if (c < 1 || static_cast<std::size_t>(c) > b.class_names.size())
                fail(ErrorCode::format, "model refers to an unknown class id");
        return b;
    } catch (const io::json::exception& e) {
        fail(ErrorCode::format, std::string("corrupt model: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::format) throw;
        fail(ErrorCode::format, std::string("corrupt model: ") + e.what());
    }
}

void save_model(const ModelBundle& bundle, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write " + path);
    out << to_json_text(bundle);
    if (!out) fail(ErrorCode::io, "failed writing " + path);
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return bundle_from_json_text(ss.str());
}

}  // namespace svmtree
