// Serial-reference vs OpenMP benchmark for the data-parallel kernels:
// ALE bootstrap replicates, global Shapley instances, and the MCCV grid.
// Both modes must produce bit-identical results; any mismatch fails the run.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "credlens/dataset.hpp"
#include "credlens/gbt.hpp"
#include "credlens/interpret.hpp"
#include "credlens/parallel.hpp"
#include "credlens/pipeline.hpp"

using namespace credlens;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

struct BenchResult {
    double serial_ms = 0.0;
    double openmp_ms = 0.0;
    bool identical = false;
};

template <typename Kernel>
BenchResult run_both(Kernel&& kernel) {
    BenchResult r;
    par::set_mode(par::Mode::serial);
    auto t0 = std::chrono::steady_clock::now();
    const auto serial_out = kernel();
    r.serial_ms = ms_since(t0);

    par::set_mode(par::Mode::openmp);
    t0 = std::chrono::steady_clock::now();
    const auto omp_out = kernel();
    r.openmp_ms = ms_since(t0);

    r.identical = serial_out == omp_out;
    return r;
}

void print_row(const char* name, const BenchResult& r) {
    std::printf("%-24s %10.1f ms %10.1f ms %8.2fx   %s\n", name, r.serial_ms, r.openmp_ms,
                r.openmp_ms > 0 ? r.serial_ms / r.openmp_ms : 0.0,
                r.identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int threads = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) threads = std::atoi(argv[i + 1]);
    }
    par::set_max_threads(threads);

    std::printf("building fixtures...\n");
    const Dataset data = synthesize_firms(default_moments(), 20000, 7);
    const Dataset transformed = apply_log_transform(data, size_feature_names());

    GbtConfig gcfg;
    gcfg.n_trees = 100;
    const FittedModel model = fit_gbt(transformed, gcfg);
    const PredictFn fn = predictor(model);

    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");
    bool all_ok = true;

    {
        const auto r = run_both([&] {
            std::vector<double> flat;
            for (std::size_t j = 0; j < transformed.p(); ++j) {
                const ALECurve c = ale_bootstrap(fn, transformed, j, 40, 200, 11);
                flat.insert(flat.end(), c.effects.begin(), c.effects.end());
                flat.insert(flat.end(), c.lower.begin(), c.lower.end());
                flat.insert(flat.end(), c.upper.begin(), c.upper.end());
            }
            return flat;
        });
        print_row("ale bootstrap x9", r);
        all_ok = all_ok && r.identical;
    }
    {
        const auto r = run_both([&] {
            GlobalShapleyConfig cfg;
            cfg.sample_size = 200;
            cfg.background_size = 60;
            cfg.seed = 3;
            const ShapleySummary s = global_shapley(fn, transformed, cfg);
            std::vector<double> flat = s.importance;
            flat.insert(flat.end(), s.phi.data.begin(), s.phi.data.end());
            return flat;
        });
        print_row("global shapley", r);
        all_ok = all_ok && r.identical;
    }
    {
        ExperimentConfig cfg = default_config();
        cfg.data.synthetic->n = 6000;
        cfg.mccv.iterations = 8;
        cfg.interpret.bootstrap_replicates = 50;
        cfg.interpret.shapley_sample = 50;
        for (auto& plan : cfg.models) {
            plan.enabled = plan.family == ModelFamily::gbt || plan.family == ModelFamily::lr;
        }
        const auto r = run_both([&] {
            const ExperimentReport report = run_experiment(cfg);
            std::vector<double> flat;
            for (const auto& m : report.models) {
                flat.push_back(m.metrics.auc);
                for (const auto& row : m.cv_auc) flat.insert(flat.end(), row.begin(), row.end());
            }
            return flat;
        });
        print_row("mccv pipeline", r);
        all_ok = all_ok && r.identical;
    }

    if (!all_ok) {
        std::printf("serial and openmp outputs diverged\n");
        return 1;
    }
    return 0;
}
