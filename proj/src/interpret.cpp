#include "credlens/interpret.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "credlens/parallel.hpp"
#include "credlens/resampling.hpp"

namespace credlens {

namespace {

std::size_t bin_of(const std::vector<double>& boundaries, double x) {
    // Half-open bins (z_{k-1}, z_k], lowest bin closed.
    const auto it = std::lower_bound(boundaries.begin() + 1, boundaries.end(), x);
    const auto idx = static_cast<std::size_t>(it - (boundaries.begin() + 1));
    return std::min(idx, boundaries.size() - 2);
}

// Per-row bin assignment and prediction difference across the row's bin.
struct AleWork {
    std::vector<double> boundaries;
    std::vector<std::size_t> bin;
    std::vector<double> diff;
    bool reduced = false;
};

std::vector<double> quantile_boundaries(std::vector<double> sorted, std::size_t bins) {
    std::vector<double> b;
    b.reserve(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) {
        b.push_back(sorted_quantile(sorted, static_cast<double>(k) / static_cast<double>(bins)));
    }
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

AleWork build_ale_work(const PredictFn& model, const Dataset& d, std::size_t feature,
                       std::size_t bins) {
    const std::size_t n = d.n();
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = d.features(i, feature);
    std::sort(sorted.begin(), sorted.end());

    AleWork work;
    work.boundaries = quantile_boundaries(std::move(sorted), bins);
    work.reduced = work.boundaries.size() != bins + 1;

    // Drop boundaries of empty bins (leftward merge; the lowest bin merges right).
    for (;;) {
        const std::size_t k = work.boundaries.size() - 1;
        std::vector<std::size_t> counts(k, 0);
        work.bin.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            work.bin[i] = bin_of(work.boundaries, d.features(i, feature));
            ++counts[work.bin[i]];
        }
        std::size_t empty = k;
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                empty = j;
                break;
            }
        }
        if (empty == k || k == 1) break;
        work.boundaries.erase(work.boundaries.begin() +
                              static_cast<std::ptrdiff_t>(empty == 0 ? 1 : empty));
        work.reduced = true;
    }

    Matrix lo = d.features;
    Matrix hi = d.features;
    for (std::size_t i = 0; i < n; ++i) {
        lo(i, feature) = work.boundaries[work.bin[i]];
        hi(i, feature) = work.boundaries[work.bin[i] + 1];
    }
    const std::vector<double> f_lo = model(lo);
    const std::vector<double> f_hi = model(hi);
    if (f_lo.size() != n || f_hi.size() != n) throw NumericError("predictor returned wrong size");
    work.diff.resize(n);
    for (std::size_t i = 0; i < n; ++i) work.diff[i] = f_hi[i] - f_lo[i];
    return work;
}

// Accumulate-and-center over one multiset of rows. Bins left empty by the
// resample contribute no local effect.
std::vector<double> accumulate_effects(const AleWork& work, const std::vector<std::size_t>& rows,
                                       std::vector<std::size_t>* counts_out) {
    const std::size_t k = work.boundaries.size() - 1;
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> cnt(k, 0);
    for (const std::size_t i : rows) {
        sum[work.bin[i]] += work.diff[i];
        ++cnt[work.bin[i]];
    }
    std::vector<double> eff(k, 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        if (cnt[j] > 0) acc += sum[j] / static_cast<double>(cnt[j]);
        eff[j] = acc;
    }
    double center = 0.0;
    for (std::size_t j = 0; j < k; ++j) center += static_cast<double>(cnt[j]) * eff[j];
    center /= static_cast<double>(rows.size());
    for (double& e : eff) e -= center;
    if (counts_out) *counts_out = std::move(cnt);
    return eff;
}

ALECurve degenerate_curve(const Dataset& d, std::size_t feature) {
    ALECurve c;
    c.feature = feature;
    const double v = d.features(0, feature);
    c.boundaries = {v, v};
    c.effects = {0.0};
    c.counts = {d.n()};
    c.reduced_bins = true;
    return c;
}

bool feature_constant(const Dataset& d, std::size_t feature) {
    const double v = d.features(0, feature);
    for (std::size_t i = 1; i < d.n(); ++i) {
        if (d.features(i, feature) != v) return false;
    }
    return true;
}

void check_ale_args(const Dataset& d, std::size_t feature, std::size_t bins) {
    if (d.n() < 1) throw DataError("ale: empty dataset");
    if (feature >= d.p()) throw DataError("ale: feature index out of range");
    if (bins < 1) throw ConfigError("ale: bin count must be >= 1");
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

}  // namespace

ALECurve ale_curve(const PredictFn& model, const Dataset& d, std::size_t feature,
                   std::size_t bins) {
    check_ale_args(d, feature, bins);
    if (feature_constant(d, feature)) return degenerate_curve(d, feature);

    const AleWork work = build_ale_work(model, d, feature, bins);
    ALECurve curve;
    curve.feature = feature;
    curve.boundaries = work.boundaries;
    curve.reduced_bins = work.reduced;
    curve.effects = accumulate_effects(work, all_rows(d.n()), &curve.counts);
    return curve;
}

ALECurve ale_bootstrap(const PredictFn& model, const Dataset& d, std::size_t feature,
                       std::size_t bins, std::size_t replicates, std::uint64_t seed,
                       double band_lo, double band_hi) {
    check_ale_args(d, feature, bins);
    if (replicates < 2) throw ConfigError("ale_bootstrap: replicates must be >= 2");
    if (!(band_lo >= 0.0 && band_lo < band_hi && band_hi <= 1.0)) {
        throw ConfigError("ale_bootstrap: bad band quantiles");
    }
    if (feature_constant(d, feature)) {
        ALECurve c = degenerate_curve(d, feature);
        c.lower = {0.0};
        c.upper = {0.0};
        c.band_lo = band_lo;
        c.band_hi = band_hi;
        return c;
    }

    const AleWork work = build_ale_work(model, d, feature, bins);
    const std::size_t k = work.boundaries.size() - 1;

    ALECurve curve;
    curve.feature = feature;
    curve.boundaries = work.boundaries;
    curve.reduced_bins = work.reduced;
    curve.effects = accumulate_effects(work, all_rows(d.n()), &curve.counts);
    curve.band_lo = band_lo;
    curve.band_hi = band_hi;

    // The model is fixed and resampled rows keep their bin and difference, so
    // replicates only re-aggregate precomputed values.
    const auto resamples = bootstrap_indices(d.n(), replicates, seed);
    Matrix replicate_effects(replicates, k);
    par::parallel_for(replicates, [&](std::size_t r) {
        const std::vector<double> eff = accumulate_effects(work, resamples[r], nullptr);
        std::copy(eff.begin(), eff.end(), replicate_effects.row(r));
    });

    curve.lower.resize(k);
    curve.upper.resize(k);
    std::vector<double> column(replicates);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t r = 0; r < replicates; ++r) column[r] = replicate_effects(r, j);
        std::sort(column.begin(), column.end());
        curve.lower[j] = std::min(sorted_quantile(column, band_lo), curve.effects[j]);
        curve.upper[j] = std::max(sorted_quantile(column, band_hi), curve.effects[j]);
    }
    return curve;
}

std::vector<double> pd_curve(const PredictFn& model, const Dataset& d, std::size_t feature,
                             const std::vector<double>& grid) {
    if (d.n() < 1) throw DataError("pd_curve: empty dataset");
    if (feature >= d.p()) throw DataError("pd_curve: feature index out of range");
    if (grid.empty()) throw ConfigError("pd_curve: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("pd_curve: grid not sorted");

    const std::size_t n = d.n();
    std::vector<double> pd(grid.size());
    Matrix mod = d.features;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t i = 0; i < n; ++i) mod(i, feature) = grid[g];
        const std::vector<double> f = model(mod);
        pd[g] = mean(f);
    }

    // Weight each grid value by the rows falling in its segment, mirroring the
    // ALE bin counts when the grid is the ALE right boundaries.
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = d.features(i, feature);
        const auto it = std::lower_bound(grid.begin(), grid.end(), x);
        const auto idx = std::min(static_cast<std::size_t>(it - grid.begin()), grid.size() - 1);
        w[idx] += 1.0;
    }
    double center = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) center += w[g] * pd[g];
    center /= static_cast<double>(n);
    for (double& v : pd) v -= center;
    return pd;
}

// ---------------------------------------------------------------------------
// Shapley values
// ---------------------------------------------------------------------------

namespace {

std::vector<double> coalition_values(const PredictFn& model, const Dataset& background,
                                     const std::vector<double>& x) {
    const std::size_t p = background.p();
    const std::size_t nb = background.n();
    const std::size_t total = std::size_t{1} << p;
    // Chunk masks so each predict call sees a reasonably large batch.
    const std::size_t chunk = std::max<std::size_t>(1, 8192 / std::max<std::size_t>(nb, 1));
    std::vector<double> v(total);
    for (std::size_t start = 0; start < total; start += chunk) {
        const std::size_t count = std::min(chunk, total - start);
        Matrix composite(count * nb, p);
        for (std::size_t c = 0; c < count; ++c) {
            const std::size_t mask = start + c;
            for (std::size_t b = 0; b < nb; ++b) {
                double* row = composite.row(c * nb + b);
                const double* bg = background.features.row(b);
                for (std::size_t j = 0; j < p; ++j) {
                    row[j] = (mask >> j) & 1u ? x[j] : bg[j];
                }
            }
        }
        const std::vector<double> f = model(composite);
        for (std::size_t c = 0; c < count; ++c) {
            double s = 0.0;
            for (std::size_t b = 0; b < nb; ++b) s += f[c * nb + b];
            v[start + c] = s / static_cast<double>(nb);
        }
    }
    return v;
}

std::vector<double> shapley_exact(const PredictFn& model, const Dataset& background,
                                  const std::vector<double>& x) {
    const std::size_t p = background.p();
    const std::vector<double> v = coalition_values(model, background, x);

    // w(s) = s! (p-1-s)! / p! = 1 / (p * C(p-1, s))
    std::vector<double> w(p);
    for (std::size_t s = 0; s < p; ++s) {
        double binom = 1.0;
        for (std::size_t t = 0; t < s; ++t) {
            binom = binom * static_cast<double>(p - 1 - t) / static_cast<double>(t + 1);
        }
        w[s] = 1.0 / (static_cast<double>(p) * binom);
    }

    std::vector<double> phi(p, 0.0);
    const std::size_t total = std::size_t{1} << p;
    for (std::size_t mask = 0; mask < total; ++mask) {
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        for (std::size_t j = 0; j < p; ++j) {
            if ((mask >> j) & 1u) continue;
            phi[j] += w[size] * (v[mask | (std::size_t{1} << j)] - v[mask]);
        }
    }
    return phi;
}

std::vector<double> shapley_sampling(const PredictFn& model, const Dataset& background,
                                     const std::vector<double>& x, std::size_t permutations,
                                     std::uint64_t seed) {
    const std::size_t p = background.p();
    const std::size_t nb = background.n();
    const std::vector<double> base_vals = model(background.features);

    Matrix contributions(permutations, p);
    par::parallel_for(permutations, [&](std::size_t perm_idx) {
        auto rng = make_rng(mix_seed(seed, perm_idx));
        std::vector<std::size_t> perm(p);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);

        Matrix z = background.features;
        std::vector<double> prev = base_vals;
        for (std::size_t t = 0; t < p; ++t) {
            const std::size_t j = perm[t];
            for (std::size_t b = 0; b < nb; ++b) z(b, j) = x[j];
            const std::vector<double> cur = model(z);
            double delta = 0.0;
            for (std::size_t b = 0; b < nb; ++b) delta += cur[b] - prev[b];
            contributions(perm_idx, j) = delta / static_cast<double>(nb);
            prev = cur;
        }
    });

    std::vector<double> phi(p, 0.0);
    for (std::size_t r = 0; r < permutations; ++r) {
        for (std::size_t j = 0; j < p; ++j) phi[j] += contributions(r, j);
    }
    for (double& v : phi) v /= static_cast<double>(permutations);
    return phi;
}

}  // namespace

std::vector<double> shapley_instance(const PredictFn& model, const Dataset& background,
                                     const std::vector<double>& x, const ShapleyConfig& config) {
    if (background.n() < 1) throw DataError("shapley: empty background");
    const std::size_t p = background.p();
    if (x.size() != p) throw DataError("shapley: instance width mismatch");

    bool exact = config.mode == ShapleyConfig::Mode::exact;
    if (config.mode == ShapleyConfig::Mode::automatic) exact = p <= config.exact_limit;
    if (exact && p > 25) throw ConfigError("exact shapley limited to p <= 25");

    if (exact) return shapley_exact(model, background, x);
    if (config.permutations < 1) throw ConfigError("shapley: permutations must be >= 1");
    return shapley_sampling(model, background, x, config.permutations, config.seed);
}

ShapleySummary global_shapley(const PredictFn& model, const Dataset& d,
                              const GlobalShapleyConfig& config) {
    if (d.n() < 1) throw DataError("global_shapley: empty dataset");
    const std::size_t p = d.p();

    const auto subsample = [&](std::size_t want, std::uint64_t seed) {
        std::vector<std::size_t> idx(d.n());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        if (want < d.n()) {
            auto rng = make_rng(seed);
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(want);
            std::sort(idx.begin(), idx.end());
        }
        return idx;
    };

    const Dataset background =
        d.select_rows(subsample(std::max<std::size_t>(1, config.background_size),
                                mix_seed(config.seed, 0xb6)));
    const auto instance_idx =
        subsample(std::max<std::size_t>(1, config.sample_size), mix_seed(config.seed, 0x1a));

    ShapleySummary summary;
    summary.feature_names = d.feature_names;
    summary.baseline = mean(model(background.features));
    summary.phi = Matrix(instance_idx.size(), p);

    par::parallel_for(instance_idx.size(), [&](std::size_t r) {
        std::vector<double> x(p);
        for (std::size_t j = 0; j < p; ++j) x[j] = d.features(instance_idx[r], j);
        ShapleyConfig inst = config.instance;
        inst.seed = mix_seed(config.instance.seed, r);
        const std::vector<double> phi = shapley_instance(model, background, x, inst);
        std::copy(phi.begin(), phi.end(), summary.phi.row(r));
    });

    summary.importance.assign(p, 0.0);
    for (std::size_t r = 0; r < summary.phi.rows; ++r) {
        for (std::size_t j = 0; j < p; ++j) {
            summary.importance[j] += std::fabs(summary.phi(r, j));
        }
    }
    for (double& v : summary.importance) v /= static_cast<double>(summary.phi.rows);

    summary.ranking.resize(p);
    std::iota(summary.ranking.begin(), summary.ranking.end(), std::size_t{0});
    std::sort(summary.ranking.begin(), summary.ranking.end(), [&](std::size_t a, std::size_t b) {
        if (summary.importance[a] != summary.importance[b]) {
            return summary.importance[a] > summary.importance[b];
        }
        return a < b;
    });
    return summary;
}

nlohmann::json ale_to_plot_json(const ALECurve& curve, const std::string& feature_name,
                                bool antilog_axis) {
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t k = 0; k < curve.bins(); ++k) {
        nlohmann::json pt = {{"x", curve.boundaries[k + 1]},
                             {"effect", curve.effects[k]},
                             {"count", curve.counts[k]}};
        if (curve.has_bands()) {
            pt["lo"] = curve.lower[k];
            pt["hi"] = curve.upper[k];
        }
        points.push_back(std::move(pt));
    }
    return {{"type", "ale"},
            {"feature", feature_name},
            {"antilog_x", antilog_axis},
            {"x_min", curve.boundaries.front()},
            {"reduced_bins", curve.reduced_bins},
            {"points", points}};
}

nlohmann::json shapley_to_plot_json(const ShapleySummary& summary) {
    nlohmann::json items = nlohmann::json::array();
    for (const std::size_t j : summary.ranking) {
        items.push_back(
            {{"feature", summary.feature_names[j]}, {"importance", summary.importance[j]}});
    }
    return {{"type", "shapley"}, {"baseline", summary.baseline}, {"items", items}};
}

}  // namespace credlens
