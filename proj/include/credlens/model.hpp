#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "credlens/common.hpp"

namespace credlens {

/// Batch probability predictor; the uniform surface the interpretation layer
/// consumes. Any callable works, not just fitted models.
using PredictFn = std::function<std::vector<double>(const Matrix&)>;

enum class ModelFamily { lr, probit, gev, gbt, fann };

/// Stable keys used in CLI flags, config files and report documents.
std::string family_key(ModelFamily f);
ModelFamily family_from_key(const std::string& key);
std::string family_display_name(ModelFamily f);
/// Report/table order: fann, gbt, gev, lr, probit.
const std::vector<ModelFamily>& family_table_order();

enum class LinkKind { logit, probit, gev };

struct LinearBinaryModel {
    LinkKind link = LinkKind::logit;
    std::vector<double> beta;  // intercept first
    double gev_tail = 0.0;     // xi, gev link only
    std::size_t iterations = 0;
    double final_log_lik = 0.0;
    bool ridge_used = false;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;
    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double value_at(const double* row) const;
};

struct TreeEnsemble {
    std::vector<Tree> trees;
    double learning_rate = 0.1;
    double base_score = 0.0;  // initial log-odds
    // prediction = sigmoid(base_score + learning_rate * sum of tree outputs)
};

struct FeedforwardNet {
    std::vector<double> input_mean;  // training standardization
    std::vector<double> input_sd;
    Matrix hidden_weights;             // M x p
    std::vector<double> hidden_bias;   // M
    std::vector<double> output_weights;  // M
    double output_bias = 0.0;

    std::size_t hidden_size() const { return hidden_bias.size(); }
    std::size_t input_size() const { return input_mean.size(); }
};

/// One fitted classifier behind the shared predict_proba surface.
struct FittedModel {
    ModelFamily family = ModelFamily::lr;
    std::variant<LinearBinaryModel, TreeEnsemble, FeedforwardNet> params;
    std::vector<std::string> feature_names;
    std::vector<std::uint8_t> log_transformed;
    std::string training_config_json;  // opaque echo of the fit config
    std::uint64_t seed = 0;

    std::size_t input_width() const { return feature_names.size(); }
};

/// Deterministic batch prediction; probabilities in [0,1].
std::vector<double> predict_proba(const FittedModel& m, const Matrix& rows);
PredictFn predictor(const FittedModel& m);

/// Versioned JSON document sufficient for bit-exact reload of predictions.
nlohmann::json model_to_json(const FittedModel& m);
FittedModel model_from_json(const nlohmann::json& j);

}  // namespace credlens
