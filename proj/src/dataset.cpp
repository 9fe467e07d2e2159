#include "credlens/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "credlens/parallel.hpp"

namespace credlens {

namespace {

const std::vector<std::string> kCanonicalFeatures = {
    "cash_flow", "gearing_ratio", "employees",      "profit_margin", "roce",
    "roe",       "sales",         "solvency_ratio", "total_assets"};
const std::string kStatusColumn = "status";
const std::vector<std::string> kSizeFeatures = {"sales", "total_assets", "employees"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

/// Parses one numeric cell; comma-decimal inputs ("1.234,56") are normalized
/// first. Returns nullopt for blank or non-numeric cells.
std::optional<double> parse_cell(const std::string& raw, bool decimal_comma) {
    std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    if (decimal_comma) {
        std::string norm;
        norm.reserve(s.size());
        for (char c : s) {
            if (c == '.') continue;  // thousands separator
            norm.push_back(c == ',' ? '.' : c);
        }
        s = std::move(norm);
    }
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (begin != end && *begin == '+') ++begin;
    double v = 0.0;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

const std::vector<std::string>& canonical_features() { return kCanonicalFeatures; }
const std::string& status_column() { return kStatusColumn; }
const std::vector<std::string>& size_feature_names() { return kSizeFeatures; }

std::size_t Dataset::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if (feature_names[j] == name) return j;
    }
    throw DataError("unknown feature name: " + name);
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& idx) const {
    Dataset out;
    out.features = Matrix(idx.size(), p());
    out.labels.resize(idx.size());
    out.feature_names = feature_names;
    out.log_transformed = log_transformed;
    out.row_ids.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const std::size_t i = idx[r];
        std::copy(features.row(i), features.row(i) + p(), out.features.row(r));
        out.labels[r] = labels[i];
        out.row_ids[r] = row_ids[i];
    }
    return out;
}

void Dataset::validate() const {
    if (n() < 1) throw DataError("dataset has no rows");
    if (p() < 1) throw DataError("dataset has no features");
    if (labels.size() != n()) throw DataError("label count does not match row count");
    if (feature_names.size() != p()) throw DataError("feature name count mismatch");
    if (log_transformed.size() != p()) throw DataError("transform flag count mismatch");
    if (row_ids.size() != n()) throw DataError("row id count mismatch");
    std::set<std::string> names(feature_names.begin(), feature_names.end());
    if (names.size() != feature_names.size()) throw DataError("duplicate feature names");
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("invalid label");
    }
    for (double v : features.data) {
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    }
}

std::uint64_t Dataset::fingerprint() const {
    std::uint64_t h = fnv1a64("credlens.dataset");
    const std::uint64_t dims[2] = {n(), p()};
    h = fnv1a64(dims, sizeof(dims), h);
    for (const auto& name : feature_names) h = fnv1a64(name, h);
    h = fnv1a64(labels.data(), labels.size() * sizeof(int), h);
    h = fnv1a64(features.data.data(), features.data.size() * sizeof(double), h);
    return h;
}

void ClassMoments::validate() const {
    if (!(default_rate > 0.0 && default_rate < 1.0)) {
        throw DataError("default_rate must lie in (0,1)");
    }
    if (features.empty()) throw DataError("moments define no features");
    std::set<std::string> names;
    for (const auto& f : features) {
        if (f.survived_sd < 0.0 || f.failed_sd < 0.0) {
            throw DataError("negative standard deviation for feature " + f.name);
        }
        if (!names.insert(f.name).second) throw DataError("duplicate feature in moments: " + f.name);
    }
}

Dataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& schema,
                 const CsvOptions& options, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());

    const char sep = options.decimal_comma ? ';' : ',';
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_line(line, sep);
    std::vector<int> schema_col(schema.size(), -1);
    int status_col = -1;
    LoadReport rep;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == kStatusColumn) {
            status_col = static_cast<int>(c);
            continue;
        }
        const auto it = std::find(schema.begin(), schema.end(), name);
        if (it == schema.end()) {
            rep.ignored_columns.push_back(name);
        } else {
            schema_col[static_cast<std::size_t>(it - schema.begin())] = static_cast<int>(c);
        }
    }
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (schema_col[j] < 0) throw DataError("missing required column: " + schema[j]);
    }
    if (status_col < 0) throw DataError("missing required column: " + kStatusColumn);

    std::vector<double> values;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++rep.rows_read;
        const auto cells = split_line(line, sep);
        std::vector<double> row(schema.size());
        bool usable = true;
        for (std::size_t j = 0; j < schema.size() && usable; ++j) {
            const auto c = static_cast<std::size_t>(schema_col[j]);
            const auto v = c < cells.size() ? parse_cell(cells[c], options.decimal_comma)
                                            : std::nullopt;
            if (!v) {
                usable = false;
            } else {
                row[j] = *v;
            }
        }
        std::optional<double> status;
        if (usable) {
            const auto c = static_cast<std::size_t>(status_col);
            status = c < cells.size() ? parse_cell(cells[c], options.decimal_comma) : std::nullopt;
            if (!status) usable = false;
        }
        if (!usable) {
            ++rep.rows_dropped;
            continue;
        }
        if (*status != 0.0 && *status != 1.0) throw DataError("invalid label");
        values.insert(values.end(), row.begin(), row.end());
        labels.push_back(*status == 1.0 ? 1 : 0);
    }
    if (labels.empty()) throw DataError("no usable rows in " + path.string());

    Dataset d;
    d.features.rows = labels.size();
    d.features.cols = schema.size();
    d.features.data = std::move(values);
    d.labels = std::move(labels);
    d.feature_names = schema;
    d.log_transformed.assign(schema.size(), 0);
    d.row_ids.resize(d.n());
    std::iota(d.row_ids.begin(), d.row_ids.end(), std::int64_t{0});
    d.validate();
    if (report) *report = rep;
    return d;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    for (std::size_t j = 0; j < d.p(); ++j) out << d.feature_names[j] << ',';
    out << kStatusColumn << '\n';
    for (std::size_t i = 0; i < d.n(); ++i) {
        for (std::size_t j = 0; j < d.p(); ++j) out << format_double(d.features(i, j)) << ',';
        out << d.labels[i] << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

Dataset apply_log_transform(const Dataset& d, const std::vector<std::string>& targets) {
    Dataset out = d;
    for (const auto& name : targets) {
        const std::size_t j = out.feature_index(name);
        for (std::size_t i = 0; i < out.n(); ++i) {
            // Size variables are semantically nonnegative; clamp then ln(x+1).
            out.features(i, j) = std::log1p(std::max(out.features(i, j), 0.0));
        }
        out.log_transformed[j] = 1;
    }
    return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0,1)");
    }
    const auto n = d.n();
    const auto train_n = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(n) + 1e-9));
    if (train_n < 1 || n - train_n < 1) throw DataError("dataset too small to split");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto rng = make_rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + train_n);
    std::vector<std::size_t> test_idx(idx.begin() + train_n, idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {d.select_rows(train_idx), d.select_rows(test_idx)};
}

namespace {

// Two-sided exponential mixture with P(X > 0) = w, matching a target mean and
// sd exactly: X = theta_pos * E with prob w, else -theta_neg * E, E ~ Exp(1).
struct StepMixture {
    double w = 0.5;
    double theta_pos = 1.0;
    double theta_neg = 1.0;
};

StepMixture solve_step_mixture(double w, double mu, double sd, const std::string& name) {
    const double excess = sd * sd - mu * mu;
    if (!(w > 0.0 && w < 1.0)) throw DataError("step fraction must lie in (0,1)");
    if (excess <= 0.0) {
        throw DataError("step feature " + name + " needs sd > |mean| for the mixture solve");
    }
    StepMixture m;
    m.w = w;
    m.theta_pos = mu + std::sqrt((1.0 - w) * excess / (2.0 * w));
    m.theta_neg = -mu + std::sqrt(w * excess / (2.0 * (1.0 - w)));
    if (m.theta_pos < 0.0 || m.theta_neg < 0.0) {
        throw DataError("step feature " + name + " moments admit no nonnegative mixture solve");
    }
    return m;
}

// Lognormal parameters hitting a target mean and sd exactly.
struct LognParams {
    double mu_ln = 0.0;
    double sd_ln = 0.0;
};

LognParams solve_lognormal(double mu, double sd, const std::string& name) {
    if (!(mu > 0.0)) {
        throw DataError("lognormal feature " + name + " needs a positive mean");
    }
    LognParams p;
    const double ratio = sd / mu;
    p.sd_ln = std::sqrt(std::log1p(ratio * ratio));
    p.mu_ln = std::log(mu) - 0.5 * p.sd_ln * p.sd_ln;
    return p;
}

}  // namespace

Dataset synthesize_firms(const ClassMoments& m, std::size_t n, std::uint64_t seed,
                         const LabelMechanism& mechanism) {
    m.validate();
    if (n < 100) throw DataError("synthesize_firms requires n >= 100");

    enum class Kind { gaussian, lognormal, step };
    const std::size_t p = m.features.size();
    std::vector<Kind> kind(p, Kind::gaussian);
    std::vector<StepMixture> step_survived(p), step_failed(p);
    std::vector<LognParams> logn_survived(p), logn_failed(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto& f = m.features[j];
        if (f.name == mechanism.step_feature) {
            kind[j] = Kind::step;
            if (f.survived_sd > 0.0) {
                step_survived[j] = solve_step_mixture(mechanism.step_positive_frac_survived,
                                                      f.survived_mean, f.survived_sd, f.name);
            }
            if (f.failed_sd > 0.0) {
                step_failed[j] = solve_step_mixture(mechanism.step_positive_frac_failed,
                                                    f.failed_mean, f.failed_sd, f.name);
            }
        } else if (std::find(mechanism.lognormal_features.begin(),
                             mechanism.lognormal_features.end(),
                             f.name) != mechanism.lognormal_features.end()) {
            kind[j] = Kind::lognormal;
            if (f.survived_sd > 0.0) {
                logn_survived[j] = solve_lognormal(f.survived_mean, f.survived_sd, f.name);
            }
            if (f.failed_sd > 0.0) {
                logn_failed[j] = solve_lognormal(f.failed_mean, f.failed_sd, f.name);
            }
        }
    }

    Dataset d;
    d.features = Matrix(n, p);
    d.labels.resize(n);
    d.feature_names.reserve(p);
    for (const auto& f : m.features) d.feature_names.push_back(f.name);
    d.log_transformed.assign(p, 0);
    d.row_ids.resize(n);
    std::iota(d.row_ids.begin(), d.row_ids.end(), std::int64_t{0});

    const double clip = mechanism.truncation_sigmas;
    par::parallel_for(n, [&](std::size_t i) {
        auto rng = make_rng(mix_seed(seed, i));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::exponential_distribution<double> expo(1.0);

        const bool failed = unif(rng) < m.default_rate;
        d.labels[i] = failed ? 1 : 0;
        double* row = d.features.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const auto& f = m.features[j];
            const double mu = failed ? f.failed_mean : f.survived_mean;
            const double sd = failed ? f.failed_sd : f.survived_sd;
            if (sd == 0.0) {
                row[j] = mu;
            } else if (kind[j] == Kind::step) {
                const StepMixture& mix = failed ? step_failed[j] : step_survived[j];
                const bool positive = unif(rng) < mix.w;
                const double e = expo(rng);
                row[j] = positive ? mix.theta_pos * e : -mix.theta_neg * e;
            } else if (kind[j] == Kind::lognormal) {
                const LognParams& lp = failed ? logn_failed[j] : logn_survived[j];
                const double z = std::clamp(gauss(rng), -clip, clip);
                row[j] = std::exp(lp.mu_ln + lp.sd_ln * z);
            } else {
                const double z = std::clamp(gauss(rng), -clip, clip);
                row[j] = mu + sd * z;
            }
        }
    });
    d.validate();
    return d;
}

ClassMoments default_moments() {
    ClassMoments m;
    m.default_rate = 0.0172;
    m.features = {
        {"cash_flow", 236.802, 934.877, -278.521, 1636.028},
        {"gearing_ratio", 24.807, 23.093, 22.166, 26.010},
        {"employees", 16.506, 24.385, 11.080, 19.531},
        {"profit_margin", -2.736, 610.488, -106.845, 2190.012},
        {"roce", 12.335, 516.765, 66.367, 2284.001},
        {"roe", 23.020, 314.135, 7.146, 971.112},
        {"sales", 3427.163, 6301.229, 1259.695, 2940.010},
        {"solvency_ratio", 27.101, 24.315, -1.044, 37.342},
        {"total_assets", 3904.129, 12098.090, 1921.689, 5149.559},
    };
    return m;
}

ClassMoments moments_from_json(const nlohmann::json& j) {
    ClassMoments m;
    try {
        m.default_rate = j.at("default_rate").get<double>();
        for (const auto& f : j.at("features")) {
            ClassMoments::FeatureMoments fm;
            fm.name = f.at("name").get<std::string>();
            fm.survived_mean = f.at("survived").at("mean").get<double>();
            fm.survived_sd = f.at("survived").at("sd").get<double>();
            fm.failed_mean = f.at("failed").at("mean").get<double>();
            fm.failed_sd = f.at("failed").at("sd").get<double>();
            m.features.push_back(fm);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad moments document: ") + e.what());
    }
    m.validate();
    return m;
}

nlohmann::json moments_to_json(const ClassMoments& m) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& f : m.features) {
        features.push_back({{"name", f.name},
                            {"survived", {{"mean", f.survived_mean}, {"sd", f.survived_sd}}},
                            {"failed", {{"mean", f.failed_mean}, {"sd", f.failed_sd}}}});
    }
    return {{"default_rate", m.default_rate}, {"features", features}};
}

LabelMechanism mechanism_from_json(const nlohmann::json& j) {
    LabelMechanism m;
    try {
        if (j.contains("step_feature")) m.step_feature = j.at("step_feature").get<std::string>();
        if (j.contains("step_positive_frac")) {
            const auto& s = j.at("step_positive_frac");
            m.step_positive_frac_survived = s.at("survived").get<double>();
            m.step_positive_frac_failed = s.at("failed").get<double>();
        }
        if (j.contains("lognormal_features")) {
            m.lognormal_features = j.at("lognormal_features").get<std::vector<std::string>>();
        }
        if (j.contains("truncation_sigmas")) {
            m.truncation_sigmas = j.at("truncation_sigmas").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad mechanism document: ") + e.what());
    }
    return m;
}

nlohmann::json mechanism_to_json(const LabelMechanism& m) {
    return {{"step_feature", m.step_feature},
            {"step_positive_frac",
             {{"survived", m.step_positive_frac_survived}, {"failed", m.step_positive_frac_failed}}},
            {"lognormal_features", m.lognormal_features},
            {"truncation_sigmas", m.truncation_sigmas}};
}

}  // namespace credlens
