#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credlens/dataset.hpp"
#include "credlens/interpret.hpp"
#include "credlens/metrics.hpp"
#include "credlens/model.hpp"

namespace credlens {

struct MccvSettings {
    std::size_t iterations = 30;
    double validation_fraction = 0.3;
};

struct SyntheticSpec {
    std::size_t n = 20000;
    ClassMoments moments = default_moments();
    LabelMechanism mechanism;
};

struct DataSourceConfig {
    std::optional<std::string> csv_path;  // exclusive with synthetic
    bool decimal_comma = false;
    std::optional<SyntheticSpec> synthetic;
};

struct InterpretSettings {
    std::size_t bins = 40;
    std::size_t bootstrap_replicates = 200;
    double band_lo = 0.05;
    double band_hi = 0.95;
    std::size_t shapley_sample = 500;
    std::size_t shapley_background = 100;
    ShapleyConfig::Mode shapley_mode = ShapleyConfig::Mode::automatic;
    std::size_t shapley_permutations = 2000;
};

struct MetricSettings {
    double threshold = 0.5;
    BetaSeverity severity;
    bool severity_from_priors = false;  // Beta(pi1+1, pi0+1) instead of fixed parameters
};

struct ModelPlan {
    ModelFamily family = ModelFamily::lr;
    bool enabled = true;
    std::vector<nlohmann::json> grid;  // hyperparameter grid points
};

struct ExperimentConfig {
    DataSourceConfig data;
    std::uint64_t seed = 42;
    double train_fraction = 0.7;
    MccvSettings mccv;
    std::vector<ModelPlan> models;  // always the five families, table order
    InterpretSettings interpret;
    MetricSettings metrics;
};

ExperimentConfig default_config();
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
std::vector<nlohmann::json> default_grid(ModelFamily family);

/// Row-id provenance recorded by run_experiment; the tuner and the
/// undersampler must only ever see training rows.
struct IndexAudit {
    std::vector<std::int64_t> train_ids;
    std::vector<std::int64_t> test_ids;
    std::vector<std::int64_t> tuning_ids;    // rows handed to the MCCV tuner
    std::vector<std::int64_t> balanced_ids;  // rows present in any balanced sample
    bool leak_free() const;
};

struct ModelResult {
    ModelFamily family = ModelFamily::lr;
    MetricsReport metrics;  // held-out test set
    nlohmann::json chosen_config;
    std::size_t chosen_grid_index = 0;
    std::vector<std::vector<double>> cv_auc;  // [grid point][iteration]
    std::vector<double> cv_mean_auc;          // per grid point
    FittedModel model;
};

struct AleArtifact {
    ModelFamily family = ModelFamily::lr;
    std::string feature;
    bool antilog_axis = false;
    ALECurve curve;
};

struct ShapleyArtifact {
    ModelFamily family = ModelFamily::gbt;
    ShapleySummary summary;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string config_hash;
    std::string data_fingerprint;
    std::size_t n_total = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t rows_dropped = 0;
    std::vector<std::string> feature_names;
    std::vector<ModelResult> models;        // enabled families, table order
    std::vector<AleArtifact> ale;           // model-major, feature order
    std::vector<ShapleyArtifact> shapley;   // black-box models only
    IndexAudit audit;
    std::string timestamp;  // the one field excluded from determinism checks
};

/// load/synthesize -> log transforms -> 70/30 split -> per model MCCV grid
/// search on balanced sub-train with untouched validation -> refit best config
/// on the full balanced training set -> test metrics -> ALE with bootstrap
/// bands for every feature -> global Shapley for the black-box models.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const ExperimentReport& report);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string fnv64;
};

/// Writes report.json, metrics.csv, per-model model documents, one SVG per
/// ALE panel and per Shapley ranking, plus manifest.json with content hashes.
std::vector<ManifestEntry> emit_outputs(const ExperimentReport& report,
                                        const std::filesystem::path& dir);

}  // namespace credlens
