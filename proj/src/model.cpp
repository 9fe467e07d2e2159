#include "credlens/model.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "credlens/linear_model.hpp"

namespace credlens {

std::string family_key(ModelFamily f) {
    switch (f) {
        case ModelFamily::lr: return "lr";
        case ModelFamily::probit: return "probit";
        case ModelFamily::gev: return "gev";
        case ModelFamily::gbt: return "gbt";
        case ModelFamily::fann: return "fann";
    }
    throw ConfigError("unknown model family");
}

ModelFamily family_from_key(const std::string& key) {
    if (key == "lr") return ModelFamily::lr;
    if (key == "probit") return ModelFamily::probit;
    if (key == "gev") return ModelFamily::gev;
    if (key == "gbt") return ModelFamily::gbt;
    if (key == "fann") return ModelFamily::fann;
    throw ConfigError("unknown model key: " + key);
}

std::string family_display_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::lr: return "Logistic regression";
        case ModelFamily::probit: return "Probit";
        case ModelFamily::gev: return "GEV-link regression";
        case ModelFamily::gbt: return "Gradient boosting";
        case ModelFamily::fann: return "Feedforward neural network";
    }
    throw ConfigError("unknown model family");
}

const std::vector<ModelFamily>& family_table_order() {
    static const std::vector<ModelFamily> order = {ModelFamily::fann, ModelFamily::gbt,
                                                   ModelFamily::gev, ModelFamily::lr,
                                                   ModelFamily::probit};
    return order;
}

double Tree::value_at(const double* row) const {
    if (nodes.empty()) return 0.0;
    std::size_t idx = 0;
    while (!nodes[idx].is_leaf()) {
        const auto& nd = nodes[idx];
        idx = static_cast<std::size_t>(row[nd.feature] < nd.threshold ? nd.left : nd.right);
    }
    return nodes[idx].leaf_value;
}

namespace {

void check_rows(const FittedModel& m, const Matrix& rows) {
    if (rows.cols != m.input_width()) {
        throw DataError("predict_proba: input width mismatch");
    }
    for (double v : rows.data) {
        if (!std::isfinite(v)) throw DataError("predict_proba: non-finite input");
    }
}

std::vector<double> predict_linear(const LinearBinaryModel& lm, const Matrix& rows) {
    std::vector<double> out(rows.rows);
    const bool intercept_only = lm.beta.size() == 1;
    for (std::size_t i = 0; i < rows.rows; ++i) {
        double eta = lm.beta[0];
        if (!intercept_only) {
            const double* r = rows.row(i);
            for (std::size_t j = 0; j + 1 < lm.beta.size(); ++j) eta += lm.beta[j + 1] * r[j];
        }
        out[i] = link_inverse(lm.link, eta, lm.gev_tail);
    }
    return out;
}

std::vector<double> predict_gbt(const TreeEnsemble& e, const Matrix& rows) {
    std::vector<double> out(rows.rows);
    for (std::size_t i = 0; i < rows.rows; ++i) {
        const double* r = rows.row(i);
        double margin = e.base_score;
        for (const auto& tree : e.trees) margin += e.learning_rate * tree.value_at(r);
        out[i] = sigmoid(margin);
    }
    return out;
}

std::vector<double> predict_fann(const FeedforwardNet& net, const Matrix& rows) {
    const std::size_t p = net.input_size();
    const std::size_t m = net.hidden_size();
    std::vector<double> out(rows.rows);
    std::vector<double> xs(p);
    for (std::size_t i = 0; i < rows.rows; ++i) {
        const double* r = rows.row(i);
        for (std::size_t j = 0; j < p; ++j) xs[j] = (r[j] - net.input_mean[j]) / net.input_sd[j];
        double z = net.output_bias;
        for (std::size_t h = 0; h < m; ++h) {
            double s = net.hidden_bias[h];
            const double* w = net.hidden_weights.row(h);
            for (std::size_t j = 0; j < p; ++j) s += w[j] * xs[j];
            z += net.output_weights[h] * sigmoid(s);
        }
        out[i] = sigmoid(z);
    }
    return out;
}

}  // namespace

std::vector<double> predict_proba(const FittedModel& m, const Matrix& rows) {
    check_rows(m, rows);
    if (const auto* lm = std::get_if<LinearBinaryModel>(&m.params)) {
        return predict_linear(*lm, rows);
    }
    if (const auto* e = std::get_if<TreeEnsemble>(&m.params)) {
        return predict_gbt(*e, rows);
    }
    return predict_fann(std::get<FeedforwardNet>(m.params), rows);
}

PredictFn predictor(const FittedModel& m) {
    return [&m](const Matrix& rows) { return predict_proba(m, rows); };
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json linear_to_json(const LinearBinaryModel& lm) {
    const char* link = lm.link == LinkKind::logit   ? "logit"
                       : lm.link == LinkKind::probit ? "probit"
                                                      : "gev";
    return {{"link", link},          {"beta", lm.beta},
            {"gev_tail", lm.gev_tail}, {"iterations", lm.iterations},
            {"final_log_lik", lm.final_log_lik}, {"ridge_used", lm.ridge_used}};
}

LinearBinaryModel linear_from_json(const nlohmann::json& j) {
    LinearBinaryModel lm;
    const auto link = j.at("link").get<std::string>();
    lm.link = link == "logit" ? LinkKind::logit : link == "probit" ? LinkKind::probit : LinkKind::gev;
    lm.beta = j.at("beta").get<std::vector<double>>();
    lm.gev_tail = j.at("gev_tail").get<double>();
    lm.iterations = j.at("iterations").get<std::size_t>();
    lm.final_log_lik = j.at("final_log_lik").get<double>();
    lm.ridge_used = j.at("ridge_used").get<bool>();
    return lm;
}

nlohmann::json gbt_to_json(const TreeEnsemble& e) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : e.trees) {
        nlohmann::json feature, threshold, left, right, leaf;
        for (const auto& nd : tree.nodes) {
            feature.push_back(nd.feature);
            threshold.push_back(nd.threshold);
            left.push_back(nd.left);
            right.push_back(nd.right);
            leaf.push_back(nd.leaf_value);
        }
        trees.push_back({{"feature", feature},
                         {"threshold", threshold},
                         {"left", left},
                         {"right", right},
                         {"leaf", leaf}});
    }
    return {{"learning_rate", e.learning_rate}, {"base_score", e.base_score}, {"trees", trees}};
}

TreeEnsemble gbt_from_json(const nlohmann::json& j) {
    TreeEnsemble e;
    e.learning_rate = j.at("learning_rate").get<double>();
    e.base_score = j.at("base_score").get<double>();
    for (const auto& tj : j.at("trees")) {
        Tree tree;
        const auto& feature = tj.at("feature");
        const auto& threshold = tj.at("threshold");
        const auto& left = tj.at("left");
        const auto& right = tj.at("right");
        const auto& leaf = tj.at("leaf");
        tree.nodes.resize(feature.size());
        for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
            auto& nd = tree.nodes[k];
            nd.feature = feature[k].get<int>();
            nd.threshold = threshold[k].get<double>();
            nd.left = left[k].get<int>();
            nd.right = right[k].get<int>();
            nd.leaf_value = leaf[k].get<double>();
        }
        e.trees.push_back(std::move(tree));
    }
    return e;
}

nlohmann::json fann_to_json(const FeedforwardNet& net) {
    return {{"input_mean", net.input_mean},
            {"input_sd", net.input_sd},
            {"hidden_size", net.hidden_size()},
            {"hidden_weights", net.hidden_weights.data},
            {"hidden_bias", net.hidden_bias},
            {"output_weights", net.output_weights},
            {"output_bias", net.output_bias}};
}

FeedforwardNet fann_from_json(const nlohmann::json& j) {
    FeedforwardNet net;
    net.input_mean = j.at("input_mean").get<std::vector<double>>();
    net.input_sd = j.at("input_sd").get<std::vector<double>>();
    const auto m = j.at("hidden_size").get<std::size_t>();
    net.hidden_weights = Matrix(m, net.input_mean.size());
    net.hidden_weights.data = j.at("hidden_weights").get<std::vector<double>>();
    net.hidden_bias = j.at("hidden_bias").get<std::vector<double>>();
    net.output_weights = j.at("output_weights").get<std::vector<double>>();
    net.output_bias = j.at("output_bias").get<double>();
    if (net.hidden_weights.data.size() != m * net.input_mean.size()) {
        throw ConfigError("bad model document: hidden weight shape");
    }
    return net;
}

}  // namespace

nlohmann::json model_to_json(const FittedModel& m) {
    nlohmann::json params;
    if (const auto* lm = std::get_if<LinearBinaryModel>(&m.params)) {
        params = linear_to_json(*lm);
    } else if (const auto* e = std::get_if<TreeEnsemble>(&m.params)) {
        params = gbt_to_json(*e);
    } else {
        params = fann_to_json(std::get<FeedforwardNet>(m.params));
    }
    nlohmann::json config = nlohmann::json::object();
    if (!m.training_config_json.empty()) {
        config = nlohmann::json::parse(m.training_config_json);
    }
    std::vector<int> flags(m.log_transformed.begin(), m.log_transformed.end());
    return {{"format_version", kFormatVersion},
            {"family", family_key(m.family)},
            {"feature_names", m.feature_names},
            {"log_transformed", flags},
            {"seed", m.seed},
            {"training_config", config},
            {"params", params}};
}

FittedModel model_from_json(const nlohmann::json& j) {
    FittedModel m;
    try {
        if (j.at("format_version").get<int>() != kFormatVersion) {
            throw ConfigError("unsupported model format version");
        }
        m.family = family_from_key(j.at("family").get<std::string>());
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const auto flags = j.at("log_transformed").get<std::vector<int>>();
        m.log_transformed.assign(flags.begin(), flags.end());
        m.seed = j.at("seed").get<std::uint64_t>();
        m.training_config_json = j.at("training_config").dump();
        const auto& params = j.at("params");
        switch (m.family) {
            case ModelFamily::lr:
            case ModelFamily::probit:
            case ModelFamily::gev:
                m.params = linear_from_json(params);
                break;
            case ModelFamily::gbt:
                m.params = gbt_from_json(params);
                break;
            case ModelFamily::fann:
                m.params = fann_from_json(params);
                break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad model document: ") + e.what());
    }
    return m;
}

}  // namespace credlens
