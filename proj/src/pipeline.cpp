#include "credlens/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "credlens/fann.hpp"
#include "credlens/gbt.hpp"
#include "credlens/linear_model.hpp"
#include "credlens/parallel.hpp"
#include "credlens/resampling.hpp"
#include "credlens/svg_report.hpp"

namespace credlens {

namespace {

// Purpose salts for derived seeds.
constexpr std::uint64_t kSplitSalt = 0x5917;
constexpr std::uint64_t kMccvSalt = 0x3cc0;
constexpr std::uint64_t kBalanceSalt = 0xba10;
constexpr std::uint64_t kFinalBalanceSalt = 0xf1ba;
constexpr std::uint64_t kCellFitSalt = 0xf170;
constexpr std::uint64_t kFinalFitSalt = 0xf1f0;
constexpr std::uint64_t kAleSalt = 0xa1e0;
constexpr std::uint64_t kShapleySalt = 0x54a0;

int family_int(ModelFamily f) { return static_cast<int>(f); }

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(name) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string(name) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(std::string(name) + ": " + e.what());
    }
}

void require_keys(const nlohmann::json& point, const std::set<std::string>& allowed,
                  const std::string& family) {
    if (!point.is_object()) throw ConfigError("grid point for " + family + " must be an object");
    for (const auto& [key, value] : point.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + key + "' in " + family + " grid point");
        }
    }
}

FittedModel fit_from_json(ModelFamily family, const nlohmann::json& point, const Dataset& d,
                          std::uint64_t seed) {
    switch (family) {
        case ModelFamily::lr:
        case ModelFamily::probit: {
            require_keys(point, {}, family_key(family));
            LinearFitConfig cfg;
            cfg.seed = seed;
            return fit_linear(d, family == ModelFamily::lr ? LinkKind::logit : LinkKind::probit,
                              cfg);
        }
        case ModelFamily::gev: {
            require_keys(point, {"xi"}, "gev");
            LinearFitConfig cfg;
            cfg.seed = seed;
            if (point.contains("xi")) cfg.gev_xi = point.at("xi").get<double>();
            return fit_linear(d, LinkKind::gev, cfg);
        }
        case ModelFamily::gbt: {
            require_keys(point, {"n_trees", "max_depth", "learning_rate", "l2", "min_child_weight"},
                         "gbt");
            GbtConfig cfg;
            cfg.n_trees = point.value("n_trees", cfg.n_trees);
            cfg.max_depth = point.value("max_depth", cfg.max_depth);
            cfg.learning_rate = point.value("learning_rate", cfg.learning_rate);
            cfg.l2 = point.value("l2", cfg.l2);
            cfg.min_child_weight = point.value("min_child_weight", cfg.min_child_weight);
            return fit_gbt(d, cfg);
        }
        case ModelFamily::fann: {
            require_keys(point, {"hidden_size", "learning_rate", "epochs", "batch_size"}, "fann");
            FannConfig cfg;
            cfg.hidden_size = point.value("hidden_size", cfg.hidden_size);
            cfg.learning_rate = point.value("learning_rate", cfg.learning_rate);
            cfg.epochs = point.value("epochs", cfg.epochs);
            cfg.batch_size = point.value("batch_size", cfg.batch_size);
            cfg.seed = seed;
            return fit_fann(d, cfg);
        }
    }
    throw ConfigError("unknown model family");
}

}  // namespace

std::vector<nlohmann::json> default_grid(ModelFamily family) {
    switch (family) {
        case ModelFamily::lr:
        case ModelFamily::probit:
            return {nlohmann::json::object()};
        case ModelFamily::gev: {
            std::vector<nlohmann::json> grid;
            for (int k = -6; k <= 6; ++k) grid.push_back({{"xi", 0.05 * k}});
            return grid;
        }
        case ModelFamily::gbt:
            return {{{"max_depth", 2}, {"n_trees", 200}},
                    {{"max_depth", 3}, {"n_trees", 100}},
                    {{"max_depth", 3}, {"n_trees", 200}}};
        case ModelFamily::fann:
            // Balanced training samples are small (2x minority count), so the
            // tuned points train longer and faster than the single-fit defaults.
            return {{{"hidden_size", 8}, {"learning_rate", 0.1}, {"epochs", 500}, {"batch_size", 32}},
                    {{"hidden_size", 16}, {"learning_rate", 0.1}, {"epochs", 500}, {"batch_size", 32}}};
    }
    throw ConfigError("unknown model family");
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.data.synthetic = SyntheticSpec{};
    for (const ModelFamily f : family_table_order()) {
        cfg.models.push_back(ModelPlan{f, true, default_grid(f)});
    }
    return cfg;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg = default_config();
    try {
        if (j.contains("data")) {
            const auto& data = j.at("data");
            if (data.contains("csv") == data.contains("synthetic")) {
                throw ConfigError("data source must be exactly one of csv / synthetic");
            }
            if (data.contains("csv")) {
                cfg.data.synthetic.reset();
                cfg.data.csv_path = data.at("csv").get<std::string>();
                cfg.data.decimal_comma = data.value("decimal_comma", false);
            } else {
                const auto& synth = data.at("synthetic");
                SyntheticSpec spec;
                spec.n = synth.value("n", spec.n);
                if (synth.contains("moments") && !synth.at("moments").is_string()) {
                    spec.moments = moments_from_json(synth.at("moments"));
                }
                if (synth.contains("mechanism")) {
                    spec.mechanism = mechanism_from_json(synth.at("mechanism"));
                }
                cfg.data.synthetic = spec;
                cfg.data.csv_path.reset();
            }
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
        if (j.contains("mccv")) {
            cfg.mccv.iterations = j.at("mccv").value("iterations", cfg.mccv.iterations);
            cfg.mccv.validation_fraction =
                j.at("mccv").value("validation_fraction", cfg.mccv.validation_fraction);
        }
        if (j.contains("models")) {
            for (auto& plan : cfg.models) {
                const std::string key = family_key(plan.family);
                if (!j.at("models").contains(key)) continue;
                const auto& mj = j.at("models").at(key);
                plan.enabled = mj.value("enabled", true);
                if (mj.contains("grid")) {
                    plan.grid.clear();
                    for (const auto& point : mj.at("grid")) plan.grid.push_back(point);
                }
            }
        }
        if (j.contains("interpret")) {
            const auto& ij = j.at("interpret");
            cfg.interpret.bins = ij.value("bins", cfg.interpret.bins);
            cfg.interpret.bootstrap_replicates =
                ij.value("bootstrap", cfg.interpret.bootstrap_replicates);
            if (ij.contains("band")) {
                cfg.interpret.band_lo = ij.at("band").at(0).get<double>();
                cfg.interpret.band_hi = ij.at("band").at(1).get<double>();
            }
            if (ij.contains("shapley")) {
                const auto& sj = ij.at("shapley");
                cfg.interpret.shapley_sample = sj.value("sample_size", cfg.interpret.shapley_sample);
                cfg.interpret.shapley_background =
                    sj.value("background_size", cfg.interpret.shapley_background);
                cfg.interpret.shapley_permutations =
                    sj.value("permutations", cfg.interpret.shapley_permutations);
                const std::string mode = sj.value("mode", std::string("auto"));
                if (mode == "auto") {
                    cfg.interpret.shapley_mode = ShapleyConfig::Mode::automatic;
                } else if (mode == "exact") {
                    cfg.interpret.shapley_mode = ShapleyConfig::Mode::exact;
                } else if (mode == "sampling") {
                    cfg.interpret.shapley_mode = ShapleyConfig::Mode::sampling;
                } else {
                    throw ConfigError("unknown shapley mode: " + mode);
                }
            }
        }
        if (j.contains("metrics")) {
            const auto& mj = j.at("metrics");
            cfg.metrics.threshold = mj.value("threshold", cfg.metrics.threshold);
            if (mj.contains("severity")) {
                if (mj.at("severity").is_string()) {
                    if (mj.at("severity").get<std::string>() != "priors") {
                        throw ConfigError("severity must be 'priors' or {alpha, beta}");
                    }
                    cfg.metrics.severity_from_priors = true;
                } else {
                    cfg.metrics.severity.alpha = mj.at("severity").at("alpha").get<double>();
                    cfg.metrics.severity.beta = mj.at("severity").at("beta").get<double>();
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad experiment config: ") + e.what());
    }
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json data;
    if (cfg.data.csv_path) {
        data = {{"csv", *cfg.data.csv_path}, {"decimal_comma", cfg.data.decimal_comma}};
    } else if (cfg.data.synthetic) {
        data = {{"synthetic",
                 {{"n", cfg.data.synthetic->n},
                  {"moments", moments_to_json(cfg.data.synthetic->moments)},
                  {"mechanism", mechanism_to_json(cfg.data.synthetic->mechanism)}}}};
    }
    nlohmann::json models;
    for (const auto& plan : cfg.models) {
        models[family_key(plan.family)] = {{"enabled", plan.enabled}, {"grid", plan.grid}};
    }
    const char* mode = cfg.interpret.shapley_mode == ShapleyConfig::Mode::automatic ? "auto"
                       : cfg.interpret.shapley_mode == ShapleyConfig::Mode::exact   ? "exact"
                                                                                     : "sampling";
    nlohmann::json severity;
    if (cfg.metrics.severity_from_priors) {
        severity = "priors";
    } else {
        severity = {{"alpha", cfg.metrics.severity.alpha}, {"beta", cfg.metrics.severity.beta}};
    }
    return {{"data", data},
            {"seed", cfg.seed},
            {"train_fraction", cfg.train_fraction},
            {"mccv",
             {{"iterations", cfg.mccv.iterations},
              {"validation_fraction", cfg.mccv.validation_fraction}}},
            {"models", models},
            {"interpret",
             {{"bins", cfg.interpret.bins},
              {"bootstrap", cfg.interpret.bootstrap_replicates},
              {"band", {cfg.interpret.band_lo, cfg.interpret.band_hi}},
              {"shapley",
               {{"sample_size", cfg.interpret.shapley_sample},
                {"background_size", cfg.interpret.shapley_background},
                {"permutations", cfg.interpret.shapley_permutations},
                {"mode", mode}}}}},
            {"metrics", {{"threshold", cfg.metrics.threshold}, {"severity", severity}}}};
}

bool IndexAudit::leak_free() const {
    const auto disjoint = [](const std::vector<std::int64_t>& a,
                             const std::vector<std::int64_t>& b) {
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] < b[j]) {
                ++i;
            } else if (b[j] < a[i]) {
                ++j;
            } else {
                return false;
            }
        }
        return true;
    };
    return disjoint(test_ids, tuning_ids) && disjoint(test_ids, balanced_ids);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    for (const auto& plan : cfg.models) {
        if (plan.enabled && plan.grid.empty()) {
            throw ConfigError("empty hyperparameter grid for enabled model " +
                              family_key(plan.family));
        }
    }
    if (bool(cfg.data.csv_path) == bool(cfg.data.synthetic)) {
        throw ConfigError("data source must be exactly one of csv / synthetic");
    }

    ExperimentReport report;
    report.config = cfg;
    report.config_hash = hex64(fnv1a64(config_to_json(cfg).dump()));

    // Data stage: ingest or synthesize, then log-transform the size variables.
    Dataset full = stage("load data", [&] {
        if (cfg.data.csv_path) {
            LoadReport lr;
            CsvOptions opt;
            opt.decimal_comma = cfg.data.decimal_comma;
            Dataset d = load_csv(*cfg.data.csv_path, canonical_features(), opt, &lr);
            report.rows_dropped = lr.rows_dropped;
            return d;
        }
        const auto& spec = *cfg.data.synthetic;
        return synthesize_firms(spec.moments, spec.n, cfg.seed, spec.mechanism);
    });
    full = stage("log transform", [&] {
        std::vector<std::string> targets;
        for (const auto& name : size_feature_names()) {
            if (std::find(full.feature_names.begin(), full.feature_names.end(), name) !=
                full.feature_names.end()) {
                targets.push_back(name);
            }
        }
        return apply_log_transform(full, targets);
    });
    report.data_fingerprint = hex64(full.fingerprint());
    report.n_total = full.n();
    report.feature_names = full.feature_names;

    auto [train, test] = stage("train/test split", [&] {
        return split_train_test(full, cfg.train_fraction, mix_seed(cfg.seed, kSplitSalt));
    });
    report.n_train = train.n();
    report.n_test = test.n();

    // Tuning stage: one shared MCCV plan and one balanced sample per iteration.
    const SplitPlan plan = stage("mccv plan", [&] {
        return mccv_splits(train.n(), cfg.mccv.iterations, cfg.mccv.validation_fraction,
                           mix_seed(cfg.seed, kMccvSalt));
    });
    std::vector<Dataset> balanced(plan.iterations);
    std::vector<Dataset> validation(plan.iterations);
    stage("undersample", [&] {
        par::parallel_for(plan.iterations, [&](std::size_t it) {
            balanced[it] = undersample_majority(train.select_rows(plan.splits[it].subtrain),
                                                mix_seed(cfg.seed, kBalanceSalt, it));
            validation[it] = train.select_rows(plan.splits[it].validation);
        });
        return 0;
    });
    const Dataset balanced_full = stage("undersample", [&] {
        return undersample_majority(train, mix_seed(cfg.seed, kFinalBalanceSalt));
    });

    const BetaSeverity severity = cfg.metrics.severity_from_priors
                                      ? severity_from_priors(test.labels)
                                      : cfg.metrics.severity;

    for (const auto& model_plan : cfg.models) {
        if (!model_plan.enabled) continue;
        const int fam = family_int(model_plan.family);
        const std::string key = family_key(model_plan.family);
        const std::size_t n_grid = model_plan.grid.size();

        ModelResult result;
        result.family = model_plan.family;
        result.cv_auc.assign(n_grid, std::vector<double>(plan.iterations, 0.0));

        stage("mccv grid search", [&] {
            par::parallel_for(n_grid * plan.iterations, [&](std::size_t unit) {
                const std::size_t g = unit / plan.iterations;
                const std::size_t it = unit % plan.iterations;
                const FittedModel m =
                    fit_from_json(model_plan.family, model_plan.grid[g], balanced[it],
                                  mix_seed(cfg.seed, kCellFitSalt + fam, unit));
                const auto scores = predict_proba(m, validation[it].features);
                result.cv_auc[g][it] = auc(scores, validation[it].labels);
            });
            return 0;
        });

        result.cv_mean_auc.resize(n_grid);
        for (std::size_t g = 0; g < n_grid; ++g) result.cv_mean_auc[g] = mean(result.cv_auc[g]);
        result.chosen_grid_index = static_cast<std::size_t>(
            std::max_element(result.cv_mean_auc.begin(), result.cv_mean_auc.end()) -
            result.cv_mean_auc.begin());
        result.chosen_config = model_plan.grid[result.chosen_grid_index];

        result.model = stage("final fit", [&] {
            return fit_from_json(model_plan.family, result.chosen_config, balanced_full,
                                 mix_seed(cfg.seed, kFinalFitSalt + fam, 0));
        });
        result.metrics = stage("test metrics", [&] {
            return evaluate_scores(predict_proba(result.model, test.features), test.labels,
                                   cfg.metrics.threshold, severity);
        });
        report.models.push_back(std::move(result));
    }

    // Interpretation stage runs on the training set.
    stage("ale", [&] {
        const std::size_t p = train.p();
        report.ale.resize(report.models.size() * p);
        for (std::size_t mi = 0; mi < report.models.size(); ++mi) {
            const auto& result = report.models[mi];
            const PredictFn fn = predictor(result.model);
            const int fam = family_int(result.family);
            par::parallel_for(p, [&](std::size_t j) {
                AleArtifact art;
                art.family = result.family;
                art.feature = train.feature_names[j];
                art.antilog_axis = train.log_transformed[j] != 0;
                art.curve = ale_bootstrap(fn, train, j, cfg.interpret.bins,
                                          cfg.interpret.bootstrap_replicates,
                                          mix_seed(cfg.seed, kAleSalt + fam, j),
                                          cfg.interpret.band_lo, cfg.interpret.band_hi);
                report.ale[mi * p + j] = std::move(art);
            });
        }
        return 0;
    });

    stage("global shapley", [&] {
        for (const auto& result : report.models) {
            if (result.family != ModelFamily::gbt && result.family != ModelFamily::fann) continue;
            GlobalShapleyConfig gcfg;
            gcfg.sample_size = cfg.interpret.shapley_sample;
            gcfg.background_size = cfg.interpret.shapley_background;
            gcfg.instance.mode = cfg.interpret.shapley_mode;
            gcfg.instance.permutations = cfg.interpret.shapley_permutations;
            gcfg.instance.seed = mix_seed(cfg.seed, kShapleySalt, family_int(result.family));
            gcfg.seed = gcfg.instance.seed;
            ShapleyArtifact art;
            art.family = result.family;
            art.summary = global_shapley(predictor(result.model), train, gcfg);
            report.shapley.push_back(std::move(art));
        }
        return 0;
    });

    report.audit.train_ids = train.row_ids;
    report.audit.test_ids = test.row_ids;
    std::set<std::int64_t> tuning;
    for (std::size_t it = 0; it < plan.iterations; ++it) {
        for (const std::size_t r : plan.splits[it].subtrain) tuning.insert(train.row_ids[r]);
        for (const std::size_t r : plan.splits[it].validation) tuning.insert(train.row_ids[r]);
    }
    report.audit.tuning_ids.assign(tuning.begin(), tuning.end());
    std::set<std::int64_t> bal;
    for (const auto& b : balanced) bal.insert(b.row_ids.begin(), b.row_ids.end());
    bal.insert(balanced_full.row_ids.begin(), balanced_full.row_ids.end());
    report.audit.balanced_ids.assign(bal.begin(), bal.end());
    std::sort(report.audit.train_ids.begin(), report.audit.train_ids.end());
    std::sort(report.audit.test_ids.begin(), report.audit.test_ids.end());
    if (!report.audit.leak_free()) {
        throw DataError("internal error: balanced resampling touched test rows");
    }

    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    report.timestamp = buf;
    return report;
}

namespace {

nlohmann::json metrics_to_json(const MetricsReport& m) {
    return {{"sensitivity", m.sensitivity},
            {"specificity", m.specificity},
            {"h_measure", m.h_measure},
            {"auc", m.auc},
            {"threshold", m.threshold},
            {"counts",
             {{"tp", m.counts.tp}, {"fp", m.counts.fp}, {"tn", m.counts.tn}, {"fn", m.counts.fn}}}};
}

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& r : report.models) {
        models.push_back({{"name", family_key(r.family)},
                          {"display_name", family_display_name(r.family)},
                          {"metrics", metrics_to_json(r.metrics)},
                          {"chosen_config", r.chosen_config},
                          {"chosen_grid_index", r.chosen_grid_index},
                          {"cv_auc", r.cv_auc},
                          {"cv_mean_auc", r.cv_mean_auc},
                          {"model", model_to_json(r.model)}});
    }
    nlohmann::json ale = nlohmann::json::array();
    for (const auto& art : report.ale) {
        nlohmann::json doc = ale_to_plot_json(art.curve, art.feature, art.antilog_axis);
        doc["model"] = family_key(art.family);
        ale.push_back(std::move(doc));
    }
    nlohmann::json shapley = nlohmann::json::array();
    for (const auto& art : report.shapley) {
        nlohmann::json doc = shapley_to_plot_json(art.summary);
        doc["model"] = family_key(art.family);
        shapley.push_back(std::move(doc));
    }
    return {{"format_version", 1},
            {"provenance",
             {{"config_hash", report.config_hash},
              {"seed", report.config.seed},
              {"data_fingerprint", report.data_fingerprint},
              {"n_total", report.n_total},
              {"n_train", report.n_train},
              {"n_test", report.n_test},
              {"rows_dropped", report.rows_dropped},
              {"timestamp", report.timestamp}}},
            {"config", config_to_json(report.config)},
            {"feature_names", report.feature_names},
            {"models", models},
            {"ale", ale},
            {"shapley", shapley},
            {"audit",
             {{"train_rows", report.audit.train_ids.size()},
              {"test_rows", report.audit.test_ids.size()},
              {"leak_free", report.audit.leak_free()}}}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<ManifestEntry>& manifest, const std::filesystem::path& root) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << content;
    if (!out) throw DataError("write failed: " + path.string());
    manifest.push_back({std::filesystem::relative(path, root).generic_string(),
                        hex64(fnv1a64(content))});
}

}  // namespace

std::vector<ManifestEntry> emit_outputs(const ExperimentReport& report,
                                        const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir.string());

    std::vector<ManifestEntry> manifest;
    write_file(dir / "report.json", report_to_json(report).dump(2) + "\n", manifest, dir);

    // Table-shaped metrics, model rows in report order.
    std::string csv = "model,sensitivity,specificity,h_measure,auc\n";
    for (const auto& r : report.models) {
        csv += family_key(r.family) + ',' + format_double(r.metrics.sensitivity) + ',' +
               format_double(r.metrics.specificity) + ',' + format_double(r.metrics.h_measure) +
               ',' + format_double(r.metrics.auc) + '\n';
    }
    write_file(dir / "metrics.csv", csv, manifest, dir);

    if (!report.models.empty()) {
        std::filesystem::create_directories(dir / "models", ec);
        if (ec) throw DataError("cannot create output directory");
        for (const auto& r : report.models) {
            write_file(dir / "models" / (family_key(r.family) + ".json"),
                       model_to_json(r.model).dump(2) + "\n", manifest, dir);
        }
    }
    if (!report.ale.empty()) {
        std::filesystem::create_directories(dir / "ale", ec);
        if (ec) throw DataError("cannot create output directory");
        for (const auto& art : report.ale) {
            const std::string name = family_key(art.family) + "_" + art.feature;
            const nlohmann::json doc = ale_to_plot_json(art.curve, art.feature, art.antilog_axis);
            write_file(dir / "ale" / (name + ".svg"),
                       ale_svg(doc, family_display_name(art.family) + ": " + art.feature),
                       manifest, dir);
        }
    }
    if (!report.shapley.empty()) {
        std::filesystem::create_directories(dir / "shapley", ec);
        if (ec) throw DataError("cannot create output directory");
        for (const auto& art : report.shapley) {
            const nlohmann::json doc = shapley_to_plot_json(art.summary);
            write_file(dir / "shapley" / (family_key(art.family) + ".svg"),
                       shapley_svg(doc, family_display_name(art.family) + ": global Shapley"),
                       manifest, dir);
        }
    }

    std::sort(manifest.begin(), manifest.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    nlohmann::json mj = nlohmann::json::array();
    for (const auto& entry : manifest) {
        mj.push_back({{"path", entry.path}, {"fnv64", entry.fnv64}});
    }
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write manifest");
    out << nlohmann::json{{"files", mj}}.dump(2) << "\n";
    return manifest;
}

}  // namespace credlens
