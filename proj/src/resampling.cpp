#include "credlens/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace credlens {

SplitPlan mccv_splits(std::size_t n, std::size_t iterations, double validation_fraction,
                      std::uint64_t base_seed) {
    if (iterations < 1) throw ConfigError("mccv iterations must be >= 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw ConfigError("validation_fraction must lie in (0,1)");
    }
    const auto val_n = static_cast<std::size_t>(
        std::floor(validation_fraction * static_cast<double>(n) + 1e-9));
    if (val_n < 1 || n - val_n < 1) throw DataError("too few rows for the requested split");

    SplitPlan plan;
    plan.iterations = iterations;
    plan.validation_fraction = validation_fraction;
    plan.base_seed = base_seed;
    plan.splits.resize(iterations);
    for (std::size_t it = 0; it < iterations; ++it) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        auto rng = make_rng(base_seed + it);
        std::shuffle(idx.begin(), idx.end(), rng);
        auto& split = plan.splits[it];
        split.validation.assign(idx.begin(), idx.begin() + val_n);
        split.subtrain.assign(idx.begin() + val_n, idx.end());
        std::sort(split.validation.begin(), split.validation.end());
        std::sort(split.subtrain.begin(), split.subtrain.end());
    }
    return plan;
}

Dataset undersample_majority(const Dataset& d, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < d.n(); ++i) {
        (d.labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) throw DataError("undersample_majority: a class is absent");

    auto& minority = pos.size() <= neg.size() ? pos : neg;
    auto& majority = pos.size() <= neg.size() ? neg : pos;
    auto rng = make_rng(seed);
    std::shuffle(majority.begin(), majority.end(), rng);
    majority.resize(minority.size());

    std::vector<std::size_t> keep;
    keep.reserve(2 * minority.size());
    keep.insert(keep.end(), minority.begin(), minority.end());
    keep.insert(keep.end(), majority.begin(), majority.end());
    std::sort(keep.begin(), keep.end());
    return d.select_rows(keep);
}

std::vector<std::vector<std::size_t>> bootstrap_indices(std::size_t n, std::size_t replicates,
                                                        std::uint64_t base_seed) {
    if (n < 1) throw ConfigError("bootstrap_indices: n must be >= 1");
    if (replicates < 1) throw ConfigError("bootstrap_indices: replicates must be >= 1");
    std::vector<std::vector<std::size_t>> out(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
        auto rng = make_rng(base_seed + r);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        auto& rep = out[r];
        rep.resize(n);
        for (std::size_t i = 0; i < n; ++i) rep[i] = pick(rng);
    }
    return out;
}

}  // namespace credlens
