#pragma once

#include <optional>
#include <vector>

#include "credlens/dataset.hpp"
#include "credlens/model.hpp"

namespace credlens {

struct GbtConfig {
    std::size_t n_trees = 100;
    int max_depth = 3;  // 0 grows single-leaf trees
    double learning_rate = 0.1;
    double l2 = 1.0;  // leaf weight = -G / (H + l2)
    double min_child_weight = 1.0;
    std::optional<double> base_score;  // default: log-odds of the training mean
};

struct GbtFitInfo {
    std::vector<double> round_loss;  // mean training logistic loss after each round
};

/// Second-order gradient boosting on logistic loss with greedy exact splits.
FittedModel fit_gbt(const Dataset& d, const GbtConfig& config = {}, GbtFitInfo* info = nullptr);

}  // namespace credlens
