#include "credlens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace credlens {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DataError("scores/labels length mismatch");
    if (scores.empty()) throw DataError("empty score vector");
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("invalid label");
    }
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// ROC points at every distinct score threshold, FPR ascending, endpoints
// (0,0) and (1,1) included.
std::vector<RocPoint> roc_points(const std::vector<double>& scores, const std::vector<int>& labels,
                                 std::size_t n_pos, std::size_t n_neg) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> pts;
    pts.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            if (labels[order[i]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
            ++i;
        }
        pts.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                       static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    return pts;
}

// Upper concave majorant of the ROC points (the ROC convex hull).
std::vector<RocPoint> roc_hull(const std::vector<RocPoint>& pts) {
    std::vector<RocPoint> hull;
    for (const auto& q : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross =
                (b.fpr - a.fpr) * (q.tpr - a.tpr) - (b.tpr - a.tpr) * (q.fpr - a.fpr);
            if (cross >= 0.0) {
                hull.pop_back();  // b lies on or below segment a->q
            } else {
                break;
            }
        }
        hull.push_back(q);
    }
    return hull;
}

}  // namespace

ConfusionCounts confusion(const std::vector<double>& scores, const std::vector<int>& labels,
                          double threshold) {
    check_inputs(scores, labels);
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1) {
            (predicted ? c.tp : c.fn) += 1;
        } else {
            (predicted ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const auto n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("auc needs both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks keep the half-weight tie convention exact.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) pos_rank_sum += midrank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double h_measure(const std::vector<double>& scores, const std::vector<int>& labels,
                 const BetaSeverity& severity) {
    check_inputs(scores, labels);
    if (!(severity.alpha > 0.0 && severity.beta > 0.0)) {
        throw ConfigError("Beta severity parameters must be > 0");
    }
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const auto n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("h_measure needs both classes");

    const double pi1 = static_cast<double>(n_pos) / static_cast<double>(labels.size());
    const double pi0 = 1.0 - pi1;
    const double a = severity.alpha;
    const double b = severity.beta;
    const double mean_c = a / (a + b);

    // Integrals of c*u(c) and (1-c)*u(c) over [0, x] for u = Beta(a, b).
    const auto int_c = [&](double x) { return mean_c * reg_inc_beta(a + 1.0, b, x); };
    const auto int_1mc = [&](double x) { return (1.0 - mean_c) * reg_inc_beta(a, b + 1.0, x); };

    const auto hull = roc_hull(roc_points(scores, labels, n_pos, n_neg));
    const std::size_t m = hull.size();

    // Vertex i minimizes the expected loss on [c_i, c_{i-1}] where the
    // breakpoints come from the hull slopes; walking i upward walks c downward.
    double loss = 0.0;
    double c_hi = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        double c_lo = 0.0;
        if (i + 1 < m) {
            const double run = pi0 * (hull[i + 1].fpr - hull[i].fpr);
            const double rise = pi1 * (hull[i + 1].tpr - hull[i].tpr);
            c_lo = rise / (run + rise);
        }
        if (c_lo < c_hi) {
            const double fnr = 1.0 - hull[i].tpr;
            loss += pi0 * hull[i].fpr * (int_c(c_hi) - int_c(c_lo)) +
                    pi1 * fnr * (int_1mc(c_hi) - int_1mc(c_lo));
        }
        c_hi = std::min(c_hi, c_lo);
    }

    // Score-free reference: everything positive below c* = pi1, negative above.
    const double c_star = pi1;
    const double loss_max = pi0 * int_c(c_star) + pi1 * (int_1mc(1.0) - int_1mc(c_star));
    if (loss_max <= 0.0) throw NumericError("h_measure: degenerate reference loss");
    return std::clamp(1.0 - loss / loss_max, 0.0, 1.0);
}

BetaSeverity severity_from_priors(const std::vector<int>& labels) {
    if (labels.empty()) throw DataError("empty label vector");
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const double pi1 = static_cast<double>(n_pos) / static_cast<double>(labels.size());
    return BetaSeverity{pi1 + 1.0, (1.0 - pi1) + 1.0};
}

MetricsReport evaluate_scores(const std::vector<double>& scores, const std::vector<int>& labels,
                              double threshold, const BetaSeverity& severity) {
    MetricsReport r;
    r.threshold = threshold;
    r.counts = confusion(scores, labels, threshold);
    const auto pos = r.counts.tp + r.counts.fn;
    const auto neg = r.counts.tn + r.counts.fp;
    r.sensitivity = pos > 0 ? static_cast<double>(r.counts.tp) / static_cast<double>(pos) : 0.0;
    r.specificity = neg > 0 ? static_cast<double>(r.counts.tn) / static_cast<double>(neg) : 0.0;
    r.auc = auc(scores, labels);
    r.h_measure = h_measure(scores, labels, severity);
    return r;
}

}  // namespace credlens
