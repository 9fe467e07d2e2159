#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "credlens/dataset.hpp"
#include "credlens/model.hpp"

namespace credlens {

/// Accumulated local effect of one feature: centered cumulative sum of
/// bin-wise averaged prediction differences. effects[k] is the value at the
/// right boundary of bin k; the data-weighted mean of effects is zero.
struct ALECurve {
    std::size_t feature = 0;
    std::vector<double> boundaries;  // K+1 ascending (equal pair only when degenerate)
    std::vector<double> effects;     // K
    std::vector<std::size_t> counts; // K, sums to n
    std::vector<double> lower;       // empty or K
    std::vector<double> upper;       // empty or K
    double band_lo = 0.0;
    double band_hi = 0.0;
    bool reduced_bins = false;  // requested bin count was cut (ties / constant feature)

    std::size_t bins() const { return effects.size(); }
    bool has_bands() const { return !lower.empty(); }
};

/// Bin boundaries at empirical quantiles {0, 1/K, ..., 1}; half-open bins
/// (z_{k-1}, z_k], lowest bin closed; empty bins merged leftward.
ALECurve ale_curve(const PredictFn& model, const Dataset& d, std::size_t feature,
                   std::size_t bins);

/// Bootstrap bands: data resampled, model fixed, effects recomputed against
/// the original boundary grid; bands are per-bin empirical quantiles across
/// replicates and always bracket the point estimate.
ALECurve ale_bootstrap(const PredictFn& model, const Dataset& d, std::size_t feature,
                       std::size_t bins, std::size_t replicates, std::uint64_t seed,
                       double band_lo = 0.05, double band_hi = 0.95);

/// Partial dependence at the given ascending grid values, centered by the
/// data-weighted mean so it is directly comparable with an ALE curve on the
/// same grid.
std::vector<double> pd_curve(const PredictFn& model, const Dataset& d, std::size_t feature,
                             const std::vector<double>& grid);

struct ShapleyConfig {
    enum class Mode { automatic, exact, sampling };
    Mode mode = Mode::automatic;
    std::size_t exact_limit = 12;    // automatic: exact when p <= this
    std::size_t permutations = 2000; // sampling mode
    std::uint64_t seed = 0;
};

/// Shapley attribution of model(x) - baseline across features, with absent
/// features marginalized by background substitution. Exact mode enumerates
/// all coalitions (p <= 25); sampling averages over seeded permutations.
std::vector<double> shapley_instance(const PredictFn& model, const Dataset& background,
                                     const std::vector<double>& x, const ShapleyConfig& config = {});

struct ShapleySummary {
    Matrix phi;                        // instances x p
    double baseline = 0.0;             // mean prediction over the background set
    std::vector<double> importance;    // mean |phi| per feature
    std::vector<std::size_t> ranking;  // feature indices, importance descending
    std::vector<std::string> feature_names;
};

struct GlobalShapleyConfig {
    std::size_t sample_size = 1000;    // instances attributed (capped at n)
    std::size_t background_size = 100; // background rows (capped at n)
    ShapleyConfig instance;
    std::uint64_t seed = 0;
};

ShapleySummary global_shapley(const PredictFn& model, const Dataset& d,
                              const GlobalShapleyConfig& config = {});

/// Plot-data documents: arrays of {x, effect, lo?, hi?} / {feature, importance}.
nlohmann::json ale_to_plot_json(const ALECurve& curve, const std::string& feature_name,
                                bool antilog_axis);
nlohmann::json shapley_to_plot_json(const ShapleySummary& summary);

}  // namespace credlens
