#pragma once

#include <cstddef>
#include <vector>

#include "credlens/common.hpp"

namespace credlens {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
};

/// Cost-severity distribution for the H-measure: normalized misclassification
/// cost c ~ Beta(alpha, beta).
struct BetaSeverity {
    double alpha = 2.0;
    double beta = 2.0;
};

struct MetricsReport {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double h_measure = 0.0;
    double auc = 0.0;
    double threshold = 0.5;
    ConfusionCounts counts;
};

/// Predicted positive iff score >= threshold.
ConfusionCounts confusion(const std::vector<double>& scores, const std::vector<int>& labels,
                          double threshold);

/// Mann–Whitney AUC: P(score+ > score-) + 0.5 P(tie), via midranks.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Hand's H-measure: 1 - L/L_max with L the Beta-weighted expected minimum
/// misclassification loss over the ROC convex hull and L_max the loss of the
/// score-free classifier.
double h_measure(const std::vector<double>& scores, const std::vector<int>& labels,
                 const BetaSeverity& severity = {});

/// Beta(pi1 + 1, pi0 + 1) built from the empirical class priors.
BetaSeverity severity_from_priors(const std::vector<int>& labels);

MetricsReport evaluate_scores(const std::vector<double>& scores, const std::vector<int>& labels,
                              double threshold = 0.5, const BetaSeverity& severity = {});

}  // namespace credlens
