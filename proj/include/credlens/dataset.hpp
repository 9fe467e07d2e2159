#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "credlens/common.hpp"

namespace credlens {

/// Firm-level feature matrix with binary default labels.
/// Immutable after construction; every operation returns a new Dataset.
struct Dataset {
    Matrix features;                           // n x p
    std::vector<int> labels;                   // 0 survived, 1 defaulted
    std::vector<std::string> feature_names;    // length p, unique
    std::vector<std::uint8_t> log_transformed; // length p
    std::vector<std::int64_t> row_ids;         // provenance through splits/resampling

    std::size_t n() const { return features.rows; }
    std::size_t p() const { return features.cols; }

    std::size_t feature_index(const std::string& name) const;
    Dataset select_rows(const std::vector<std::size_t>& idx) const;

    /// Throws DataError on any violated invariant.
    void validate() const;

    std::uint64_t fingerprint() const;
};

/// Per-feature class-conditional moments plus the default rate; calibration
/// input for the synthetic generator.
struct ClassMoments {
    struct FeatureMoments {
        std::string name;
        double survived_mean = 0.0;
        double survived_sd = 0.0;
        double failed_mean = 0.0;
        double failed_sd = 0.0;
    };
    std::vector<FeatureMoments> features;
    double default_rate = 0.0;

    void validate() const;
};

/// Shape knobs of the synthetic label mechanism. One designated feature gets a
/// piecewise class-conditional distribution with a density break at zero, so
/// fitted models see a genuine step; nonnegative size variables are moment-
/// matched lognormals; everything else is class-conditional Gaussian clipped
/// at `truncation_sigmas`.
struct LabelMechanism {
    std::string step_feature = "profit_margin";
    double step_positive_frac_survived = 0.75;
    double step_positive_frac_failed = 0.10;
    std::vector<std::string> lognormal_features = {"sales", "total_assets", "employees"};
    double truncation_sigmas = 8.0;
};

struct CsvOptions {
    bool decimal_comma = false;  // accept "1.234,56" style numerics
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::vector<std::string> ignored_columns;
};

/// Canonical input schema (status column excluded).
const std::vector<std::string>& canonical_features();
const std::string& status_column();

Dataset load_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& schema = canonical_features(),
                 const CsvOptions& options = {}, LoadReport* report = nullptr);

void write_csv(const Dataset& d, const std::filesystem::path& path);

/// Replaces each target column x by ln(max(x, 0) + 1) and marks the flag.
Dataset apply_log_transform(const Dataset& d, const std::vector<std::string>& targets);

/// Names of the three size variables the pipeline log-transforms.
const std::vector<std::string>& size_feature_names();

/// Seed-deterministic disjoint partition; train gets floor(n * train_fraction).
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed);

Dataset synthesize_firms(const ClassMoments& m, std::size_t n, std::uint64_t seed,
                         const LabelMechanism& mechanism = {});

/// Default generator calibration (nine accounting indicators, 1.72% default rate).
ClassMoments default_moments();

ClassMoments moments_from_json(const nlohmann::json& j);
nlohmann::json moments_to_json(const ClassMoments& m);
LabelMechanism mechanism_from_json(const nlohmann::json& j);
nlohmann::json mechanism_to_json(const LabelMechanism& m);

}  // namespace credlens
