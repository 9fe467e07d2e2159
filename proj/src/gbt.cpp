#include "credlens/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace credlens {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitCandidate {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

double leaf_objective(double g, double h, double l2) { return g * g / (h + l2); }

// Exact greedy split over one node's instances.
SplitCandidate best_split(const Matrix& X, const std::vector<double>& grad,
                          const std::vector<double>& hess, const std::vector<std::size_t>& rows,
                          const GbtConfig& cfg, double g_total, double h_total) {
    SplitCandidate best;
    const double parent_obj = leaf_objective(g_total, h_total, cfg.l2);
    std::vector<std::pair<double, std::size_t>> order(rows.size());
    for (std::size_t j = 0; j < X.cols; ++j) {
        for (std::size_t r = 0; r < rows.size(); ++r) order[r] = {X(rows[r], j), rows[r]};
        std::sort(order.begin(), order.end());
        double gl = 0.0, hl = 0.0;
        for (std::size_t r = 0; r + 1 < order.size(); ++r) {
            gl += grad[order[r].second];
            hl += hess[order[r].second];
            if (order[r].first == order[r + 1].first) continue;  // no boundary between ties
            const double hr = h_total - hl;
            if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
            const double gr = g_total - gl;
            const double gain =
                0.5 * (leaf_objective(gl, hl, cfg.l2) + leaf_objective(gr, hr, cfg.l2) - parent_obj);
            if (gain > best.gain + kMinGain) {
                const double lo = order[r].first;
                const double hi = order[r + 1].first;
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold > lo)) threshold = hi;  // adjacent representable values
                best.found = true;
                best.feature = j;
                best.threshold = threshold;
                best.gain = gain;
            }
        }
    }
    return best;
}

Tree build_tree(const Matrix& X, const std::vector<double>& grad, const std::vector<double>& hess,
                const GbtConfig& cfg) {
    Tree tree;
    struct Task {
        int node = 0;
        std::vector<std::size_t> rows;
        int depth = 0;
    };
    std::vector<Task> stack;
    tree.nodes.emplace_back();
    {
        Task root;
        root.rows.resize(X.rows);
        std::iota(root.rows.begin(), root.rows.end(), std::size_t{0});
        stack.push_back(std::move(root));
    }
    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();
        double g = 0.0, h = 0.0;
        for (std::size_t r : task.rows) {
            g += grad[r];
            h += hess[r];
        }
        TreeNode& node = tree.nodes[static_cast<std::size_t>(task.node)];
        node.leaf_value = -g / (h + cfg.l2);
        if (task.depth >= cfg.max_depth || task.rows.size() < 2) continue;
        const SplitCandidate split = best_split(X, grad, hess, task.rows, cfg, g, h);
        if (!split.found) continue;

        Task left, right;
        left.depth = right.depth = task.depth + 1;
        for (std::size_t r : task.rows) {
            (X(r, split.feature) < split.threshold ? left.rows : right.rows).push_back(r);
        }
        node.feature = static_cast<int>(split.feature);
        node.threshold = split.threshold;
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;
        left.node = node.left;
        right.node = node.right;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        stack.push_back(std::move(left));
        stack.push_back(std::move(right));
    }
    return tree;
}

}  // namespace

FittedModel fit_gbt(const Dataset& d, const GbtConfig& cfg, GbtFitInfo* info) {
    d.validate();
    if (d.n() < 2) throw DataError("fit_gbt needs at least 2 rows");
    const auto n_pos = std::count(d.labels.begin(), d.labels.end(), 1);
    if (n_pos == 0 || static_cast<std::size_t>(n_pos) == d.n()) {
        throw DataError("fit_gbt needs both classes");
    }
    if (cfg.max_depth < 0) throw ConfigError("gbt max_depth must be >= 0");
    if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0)) {
        throw ConfigError("gbt learning_rate must lie in (0,1]");
    }
    if (cfg.l2 < 0.0) throw ConfigError("gbt l2 must be >= 0");
    if (cfg.min_child_weight < 0.0) throw ConfigError("gbt min_child_weight must be >= 0");

    const std::size_t n = d.n();
    TreeEnsemble ensemble;
    ensemble.learning_rate = cfg.learning_rate;
    if (cfg.base_score) {
        ensemble.base_score = *cfg.base_score;
    } else {
        const double rate = std::clamp(
            static_cast<double>(n_pos) / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
        ensemble.base_score = std::log(rate / (1.0 - rate));
    }

    std::vector<double> margin(n, ensemble.base_score);
    std::vector<double> grad(n), hess(n);
    if (info) info->round_loss.clear();

    for (std::size_t round = 0; round < cfg.n_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - static_cast<double>(d.labels[i]);
            hess[i] = p * (1.0 - p);
        }
        Tree tree = build_tree(d.features, grad, hess, cfg);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += cfg.learning_rate * tree.value_at(d.features.row(i));
        }
        ensemble.trees.push_back(std::move(tree));
        if (info) {
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                loss += log1pexp(margin[i]) - static_cast<double>(d.labels[i]) * margin[i];
            }
            info->round_loss.push_back(loss / static_cast<double>(n));
        }
    }

    FittedModel m;
    m.family = ModelFamily::gbt;
    m.params = std::move(ensemble);
    m.feature_names = d.feature_names;
    m.log_transformed = d.log_transformed;
    m.training_config_json = nlohmann::json{{"n_trees", cfg.n_trees},
                                            {"max_depth", cfg.max_depth},
                                            {"learning_rate", cfg.learning_rate},
                                            {"l2", cfg.l2},
                                            {"min_child_weight", cfg.min_child_weight},
                                            {"base_score", std::get<TreeEnsemble>(m.params).base_score}}
                                .dump();
    return m;
}

}  // namespace credlens
