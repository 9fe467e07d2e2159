#pragma once

#include <cstdint>
#include <vector>

#include "credlens/dataset.hpp"

namespace credlens {

/// Monte Carlo cross-validation plan: repeated sub-train/validation splits of
/// one index range, drawn without replacement.
struct SplitPlan {
    struct Split {
        std::vector<std::size_t> subtrain;
        std::vector<std::size_t> validation;
    };
    std::size_t iterations = 0;
    double validation_fraction = 0.0;
    std::uint64_t base_seed = 0;
    std::vector<Split> splits;
};

/// Iteration i uses derived seed base_seed + i, so iterations are
/// independently reproducible and parallelizable.
SplitPlan mccv_splits(std::size_t n, std::size_t iterations, double validation_fraction,
                      std::uint64_t base_seed);

/// Keeps every minority row, subsamples the majority class without
/// replacement down to the minority count.
Dataset undersample_majority(const Dataset& d, std::uint64_t seed);

/// replicates draws of n indices with replacement; replicate r uses derived
/// seed base_seed + r.
std::vector<std::vector<std::size_t>> bootstrap_indices(std::size_t n, std::size_t replicates,
                                                        std::uint64_t base_seed);

}  // namespace credlens
