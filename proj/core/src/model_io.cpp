#include <json.hpp>

#include "coastcast/error.hpp"
#include "coastcast/models.hpp"
#include "coastcast/svr.hpp"
#include "coastcast/trees.hpp"

namespace coastcast {

namespace {

using nlohmann::json;

constexpr const char* kMagic = "coastcast-model";
constexpr int kSchemaVersion = 1;

json trees_to_json(const std::vector<Tree>& trees) {
    json arr = json::array();
    for (const Tree& t : trees) {
        json nodes = json::array();
        for (const TreeNode& n : t.nodes) {
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        }
        arr.push_back(std::move(nodes));
    }
    return arr;
}

std::vector<Tree> trees_from_json(const json& arr) {
    std::vector<Tree> trees;
    for (const auto& jt : arr) {
        Tree t;
        for (const auto& jn : jt) {
            TreeNode n;
            n.feature = jn.at(0).get<int>();
            n.threshold = jn.at(1).get<double>();
            n.left = jn.at(2).get<int>();
            n.right = jn.at(3).get<int>();
            n.value = jn.at(4).get<double>();
            t.nodes.push_back(n);
        }
        trees.push_back(std::move(t));
    }
    return trees;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.at(0).size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
    }
    return m;
}

json gbt_params_to_json(const GbtParams& p) {
    return {{"rounds", p.rounds},
            {"max_depth", p.max_depth},
            {"learning_rate", p.learning_rate},
            {"lambda", p.lambda}};
}

GbtParams gbt_params_from_json(const json& j) {
    GbtParams p;
    p.rounds = j.at("rounds").get<int>();
    p.max_depth = j.at("max_depth").get<int>();
    p.learning_rate = j.at("learning_rate").get<double>();
    p.lambda = j.at("lambda").get<double>();
    return p;
}

} // namespace

std::string serialize_model(const Model& model) {
    json doc;
    doc["magic"] = kMagic;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = model.kind();

    if (const auto* m = dynamic_cast<const LinearModel*>(&model)) {
        doc["intercept"] = m->intercept;
        doc["coefficients"] = m->coefficients;
    } else if (const auto* m = dynamic_cast<const SvrModel*>(&model)) {
        doc["params"] = {{"c", m->params.c},
                         {"gamma", m->params.gamma},
                         {"epsilon", m->params.epsilon},
                         {"kernel", svr_kernel_name(m->params.kernel)}};
        doc["support_x"] = matrix_to_json(m->support_x);
        doc["beta"] = m->beta;
        doc["bias"] = m->bias;
        doc["kkt_violation"] = m->kkt_violation;
        doc["passes"] = m->passes;
    } else if (const auto* m = dynamic_cast<const GbtModel*>(&model)) {
        doc["params"] = gbt_params_to_json(m->params);
        doc["trees"] = trees_to_json(m->trees);
    } else if (const auto* m = dynamic_cast<const QuantileGbtModel*>(&model)) {
        doc["params"] = gbt_params_to_json(m->params);
        doc["tau"] = m->tau;
        doc["trees"] = trees_to_json(m->trees);
    } else if (const auto* m = dynamic_cast<const RfModel*>(&model)) {
        doc["params"] = {{"n_trees", m->params.n_trees},
                         {"max_depth", m->params.max_depth},
                         {"min_leaf", m->params.min_leaf},
                         {"bootstrap", m->params.bootstrap},
                         {"features_per_split", m->params.features_per_split}};
        doc["trees"] = trees_to_json(m->trees);
    } else {
        raise(errc::bad_argument, "cannot serialize model kind " + model.kind());
    }
    return doc.dump(2) + "\n";
}

std::unique_ptr<Model> deserialize_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(errc::bad_argument, std::string("model artifact is not valid json: ") +
                                      e.what());
    }
    if (doc.value("magic", "") != kMagic) {
        raise(errc::bad_argument, "missing model magic string");
    }
    if (doc.value("schema_version", -1) != kSchemaVersion) {
        raise(errc::bad_argument, "unsupported model schema version");
    }

    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "ols") {
        auto m = std::make_unique<LinearModel>();
        m->intercept = doc.at("intercept").get<double>();
        m->coefficients = doc.at("coefficients").get<std::vector<double>>();
        return m;
    }
    if (kind == "svr") {
        auto m = std::make_unique<SvrModel>();
        const json& p = doc.at("params");
        m->params.c = p.at("c").get<double>();
        m->params.gamma = p.at("gamma").get<double>();
        m->params.epsilon = p.at("epsilon").get<double>();
        m->params.kernel = svr_kernel_from_name(p.at("kernel").get<std::string>());
        m->support_x = matrix_from_json(doc.at("support_x"));
        m->beta = doc.at("beta").get<std::vector<double>>();
        m->bias = doc.at("bias").get<double>();
        m->kkt_violation = doc.at("kkt_violation").get<double>();
        m->passes = doc.at("passes").get<int>();
        return m;
    }
    if (kind == "gbt") {
        auto m = std::make_unique<GbtModel>();
        m->params = gbt_params_from_json(doc.at("params"));
        m->trees = trees_from_json(doc.at("trees"));
        return m;
    }
    if (kind == "quantile_gbt") {
        auto m = std::make_unique<QuantileGbtModel>();
        m->params = gbt_params_from_json(doc.at("params"));
        m->tau = doc.at("tau").get<double>();
        m->trees = trees_from_json(doc.at("trees"));
        return m;
    }
    if (kind == "rf") {
        auto m = std::make_unique<RfModel>();
        const json& p = doc.at("params");
        m->params.n_trees = p.at("n_trees").get<int>();
        m->params.max_depth = p.at("max_depth").get<int>();
        m->params.min_leaf = p.at("min_leaf").get<int>();
        m->params.bootstrap = p.at("bootstrap").get<bool>();
        m->params.features_per_split = p.at("features_per_split").get<int>();
        m->trees = trees_from_json(doc.at("trees"));
        return m;
    }
    raise(errc::bad_argument, "unknown model kind '" + kind + "'");
}

} // namespace coastcast
