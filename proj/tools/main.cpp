// Command-line front end: run experiments, synthesize data, explain models.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "credlens/dataset.hpp"
#include "credlens/interpret.hpp"
#include "credlens/parallel.hpp"
#include "credlens/pipeline.hpp"
#include "credlens/svg_report.hpp"

namespace {

using namespace credlens;

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
}

std::vector<ModelFamily> parse_model_list(const std::string& csv) {
    std::vector<ModelFamily> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(family_from_key(item));
    }
    if (out.empty()) throw ConfigError("empty model list");
    return out;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, long long seed,
            const std::string& models, bool synthetic) {
    ExperimentConfig cfg =
        config_path.empty() ? default_config() : config_from_json(load_json_file(config_path));
    if (synthetic && !cfg.data.synthetic) {
        cfg.data = DataSourceConfig{};
        cfg.data.synthetic = SyntheticSpec{};
    }
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!models.empty()) {
        const auto wanted = parse_model_list(models);
        for (auto& plan : cfg.models) {
            plan.enabled =
                std::find(wanted.begin(), wanted.end(), plan.family) != wanted.end();
        }
    }

    const ExperimentReport report = run_experiment(cfg);
    const auto manifest = emit_outputs(report, out_dir);

    std::cout << "model,sensitivity,specificity,h_measure,auc\n";
    for (const auto& r : report.models) {
        std::cout << family_key(r.family) << ',' << r.metrics.sensitivity << ','
                  << r.metrics.specificity << ',' << r.metrics.h_measure << ',' << r.metrics.auc
                  << '\n';
    }
    std::cout << manifest.size() << " files written to " << out_dir << "\n";
    return 0;
}

int cmd_synth(const std::string& moments_path, std::size_t n, long long seed,
              const std::string& out_path) {
    ClassMoments moments =
        moments_path.empty() ? default_moments() : moments_from_json(load_json_file(moments_path));
    const auto s = seed >= 0 ? static_cast<std::uint64_t>(seed) : 42u;
    const Dataset d = synthesize_firms(moments, n, s);
    write_csv(d, out_path);
    std::cout << "wrote " << d.n() << " rows x " << d.p() << " features to " << out_path << "\n";
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& data_path,
                const std::string& feature, std::size_t bins, std::size_t replicates,
                long long seed, const std::string& out_dir, bool decimal_comma, bool raw) {
    const FittedModel model = model_from_json(load_json_file(model_path));
    CsvOptions opt;
    opt.decimal_comma = decimal_comma;
    Dataset d = load_csv(data_path, model.feature_names, opt);
    if (!raw) {
        // Re-apply the transforms the model was trained with.
        std::vector<std::string> targets;
        for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
            if (model.log_transformed[j]) targets.push_back(model.feature_names[j]);
        }
        d = apply_log_transform(d, targets);
    }

    const std::size_t j = d.feature_index(feature);
    const auto s = seed >= 0 ? static_cast<std::uint64_t>(seed) : 42u;
    ALECurve curve;
    if (replicates >= 2) {
        curve = ale_bootstrap(predictor(model), d, j, bins, replicates, s);
    } else {
        curve = ale_curve(predictor(model), d, j, bins);
    }
    const bool antilog = model.log_transformed[j] != 0;
    const nlohmann::json doc = ale_to_plot_json(curve, feature, antilog);

    std::filesystem::create_directories(out_dir);
    const std::string base = family_key(model.family) + "_" + feature;
    {
        std::ofstream out(std::filesystem::path(out_dir) / (base + ".json"));
        if (!out) throw DataError("cannot write output");
        out << doc.dump(2) << "\n";
    }
    {
        std::ofstream out(std::filesystem::path(out_dir) / (base + ".svg"));
        if (!out) throw DataError("cannot write output");
        out << ale_svg(doc, family_display_name(model.family) + ": " + feature);
    }
    std::cout << "ale(" << feature << "): " << curve.bins() << " bins";
    if (curve.reduced_bins) std::cout << " (reduced)";
    std::cout << ", effects in [" << *std::min_element(curve.effects.begin(), curve.effects.end())
              << ", " << *std::max_element(curve.effects.begin(), curve.effects.end()) << "]\n";
    std::cout << "wrote " << base << ".json and " << base << ".svg to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Default-prediction models with model-agnostic interpretation"};
    app.require_subcommand(1);

    int threads = 0;
    bool serial = false;
    app.add_option("--threads", threads, "OpenMP thread cap (0 = library default)");
    app.add_flag("--serial", serial, "run all kernels on the serial reference path");

    auto* run = app.add_subcommand("run", "run the full experiment pipeline");
    std::string config_path, out_dir = "out", models;
    long long seed = -1;
    bool synthetic = false;
    run->add_option("--config", config_path, "experiment config JSON");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--models", models, "comma list: lr,probit,gev,gbt,fann");
    run->add_flag("--synthetic", synthetic, "force the built-in synthetic data source");

    auto* synth = app.add_subcommand("synth", "write a synthetic firm dataset as CSV");
    std::string moments_path, synth_out = "firms.csv";
    std::size_t synth_n = 20000;
    long long synth_seed = 42;
    synth->add_option("--moments", moments_path, "class moments JSON (default: built-in)");
    synth->add_option("--n", synth_n, "number of firms");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output CSV path")->required();

    auto* explain = app.add_subcommand("explain", "ALE curve for one feature of a saved model");
    std::string model_path, data_path, feature, explain_out = "explain";
    std::size_t bins = 40, replicates = 200;
    long long explain_seed = 42;
    bool decimal_comma = false, raw = false;
    explain->add_option("--model", model_path, "model JSON document")->required();
    explain->add_option("--data", data_path, "data CSV")->required();
    explain->add_option("--feature", feature, "feature name")->required();
    explain->add_option("--bins", bins, "ALE bin count");
    explain->add_option("--bootstrap", replicates, "bootstrap replicates (0/1 disables bands)");
    explain->add_option("--seed", explain_seed, "bootstrap seed");
    explain->add_option("--out", explain_out, "output directory");
    explain->add_flag("--decimal-comma", decimal_comma, "semicolon-separated, comma decimals");
    explain->add_flag("--raw", raw, "skip the model's stored log transforms");

    CLI11_PARSE(app, argc, argv);

    credlens::par::set_max_threads(threads);
    if (serial) credlens::par::set_mode(credlens::par::Mode::serial);

    try {
        if (app.got_subcommand(run)) {
            return cmd_run(config_path, out_dir, seed, models, synthetic);
        }
        if (app.got_subcommand(synth)) {
            return cmd_synth(moments_path, synth_n, synth_seed, synth_out);
        }
        return cmd_explain(model_path, data_path, feature, bins, replicates, explain_seed,
                           explain_out, decimal_comma, raw);
    } catch (const credlens::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const credlens::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const credlens::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
