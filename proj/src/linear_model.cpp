#include "credlens/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "credlens/metrics.hpp"

namespace credlens {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kCoefExplosion = 1e3;
constexpr double kXiGumbel = 1e-12;

}  // namespace

std::vector<double> LinearFitConfig::default_xi_grid() {
    std::vector<double> grid;
    for (int k = -6; k <= 6; ++k) grid.push_back(0.05 * k);
    return grid;
}

double link_inverse(LinkKind link, double eta, double gev_tail) {
    switch (link) {
        case LinkKind::logit:
            return sigmoid(eta);
        case LinkKind::probit:
            return norm_cdf(eta);
        case LinkKind::gev: {
            if (std::fabs(gev_tail) < kXiGumbel) {
                return std::exp(-std::exp(-eta));
            }
            const double u = 1.0 + gev_tail * eta;
            if (u <= 0.0) return gev_tail > 0.0 ? 0.0 : 1.0;
            return std::exp(-std::pow(u, -1.0 / gev_tail));
        }
    }
    throw NumericError("unknown link");
}

double link_inverse_derivative(LinkKind link, double eta, double gev_tail) {
    switch (link) {
        case LinkKind::logit: {
            const double p = sigmoid(eta);
            return p * (1.0 - p);
        }
        case LinkKind::probit:
            return norm_pdf(eta);
        case LinkKind::gev: {
            if (std::fabs(gev_tail) < kXiGumbel) {
                const double t = std::exp(-eta);
                return std::exp(-t) * t;
            }
            const double u = 1.0 + gev_tail * eta;
            if (u <= 0.0) return 0.0;
            const double t = std::pow(u, -1.0 / gev_tail);
            return std::exp(-t) * std::pow(u, -(1.0 + gev_tail) / gev_tail);
        }
    }
    throw NumericError("unknown link");
}

double link_forward(LinkKind link, double p, double gev_tail) {
    if (!(p > 0.0 && p < 1.0)) throw NumericError("link_forward: p outside (0,1)");
    switch (link) {
        case LinkKind::logit:
            return std::log(p / (1.0 - p));
        case LinkKind::probit:
            return norm_quantile(p);
        case LinkKind::gev: {
            if (std::fabs(gev_tail) < kXiGumbel) {
                return -std::log(-std::log(p));
            }
            return (std::pow(-std::log(p), -gev_tail) - 1.0) / gev_tail;
        }
    }
    throw NumericError("unknown link");
}

namespace {

// Cholesky solve of the symmetric positive-definite system A x = b.
// Returns false when A is not positive definite.
bool spd_solve(std::vector<double> a, std::vector<double> b, std::size_t k,
               std::vector<double>& x) {
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = a[i * k + j];
            for (std::size_t t = 0; t < i; ++t) s -= a[i * k + t] * a[j * k + t];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                a[i * k + i] = std::sqrt(s);
            } else {
                a[j * k + i] = s / a[i * k + i];
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        double s = b[i];
        for (std::size_t t = 0; t < i; ++t) s -= a[i * k + t] * b[t];
        b[i] = s / a[i * k + i];
    }
    x.assign(k, 0.0);
    for (std::size_t ii = k; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t t = ii + 1; t < k; ++t) s -= a[t * k + ii] * x[t];
        x[ii] = s / a[ii * k + ii];
    }
    return true;
}

struct Design {
    const Dataset* d = nullptr;
    bool intercept_only = false;
    std::size_t k() const { return intercept_only ? 1 : d->p() + 1; }
    double at(std::size_t i, std::size_t j) const {
        return j == 0 ? 1.0 : d->features(i, j - 1);
    }
};

std::vector<double> etas(const Design& X, const std::vector<double>& beta) {
    std::vector<double> out(X.d->n());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double e = beta[0];
        if (!X.intercept_only) {
            const double* row = X.d->features.row(i);
            for (std::size_t j = 1; j < beta.size(); ++j) e += beta[j] * row[j - 1];
        }
        out[i] = e;
    }
    return out;
}

double log_likelihood(LinkKind link, double xi, const std::vector<double>& eta,
                      const std::vector<int>& y) {
    double ll = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double p = std::clamp(link_inverse(link, eta[i], xi), kProbClamp, 1.0 - kProbClamp);
        ll += y[i] == 1 ? std::log(p) : std::log1p(-p);
    }
    return ll;
}

bool gev_feasible(double xi, const std::vector<double>& eta) {
    if (std::fabs(xi) < kXiGumbel) return true;
    for (double e : eta) {
        if (1.0 + xi * e <= 0.0) return false;
    }
    return true;
}

bool perfectly_separated(const std::vector<double>& eta, const std::vector<int>& y) {
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if ((y[i] == 1 && eta[i] <= 0.0) || (y[i] == 0 && eta[i] >= 0.0)) return false;
    }
    return true;
}

LinearBinaryModel fit_fixed_link(const Dataset& d, LinkKind link, double xi,
                                 const LinearFitConfig& cfg) {
    const auto& y = d.labels;
    const Design X{&d, cfg.intercept_only};
    const std::size_t k = X.k();
    const std::size_t n = d.n();

    std::vector<double> beta(k, 0.0);
    std::vector<double> eta = etas(X, beta);
    double ll = log_likelihood(link, xi, eta, y);

    bool ridge_active = false;
    std::size_t iter = 0;
    std::vector<double> grad(k), hess(k * k), delta;

    for (; iter < cfg.max_iter; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hess.begin(), hess.end(), 0.0);
        // Fisher scoring: weight = (d pi/d eta)^2 / (pi (1 - pi)).
        for (std::size_t i = 0; i < n; ++i) {
            const double p =
                std::clamp(link_inverse(link, eta[i], xi), kProbClamp, 1.0 - kProbClamp);
            const double dp = link_inverse_derivative(link, eta[i], xi);
            const double denom = p * (1.0 - p);
            const double w = dp * dp / denom;
            const double s = (y[i] - p) * dp / denom;
            for (std::size_t a = 0; a < k; ++a) {
                const double xa = X.at(i, a);
                grad[a] += s * xa;
                for (std::size_t b = a; b < k; ++b) hess[a * k + b] += w * xa * X.at(i, b);
            }
        }
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < a; ++b) hess[a * k + b] = hess[b * k + a];
        }

        auto solve_with = [&](bool with_ridge) {
            std::vector<double> h = hess;
            if (with_ridge) {
                for (std::size_t a = 0; a < k; ++a) h[a * k + a] += cfg.ridge;
            }
            return spd_solve(std::move(h), grad, k, delta);
        };
        if (!solve_with(ridge_active)) {
            if (!cfg.ridge_fallback) {
                if (perfectly_separated(eta, y)) {
                    throw SeparationError("perfect separation detected");
                }
                throw NumericError("singular information matrix");
            }
            ridge_active = true;
            if (!solve_with(true)) throw NumericError("singular information matrix under ridge");
        }

        // Step halving keeps the log-likelihood non-decreasing and, for the
        // gev link, keeps 1 + xi*eta > 0 on all rows.
        double step = 1.0;
        std::vector<double> cand(k);
        std::vector<double> cand_eta;
        double cand_ll = -std::numeric_limits<double>::infinity();
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving) {
            for (std::size_t a = 0; a < k; ++a) cand[a] = beta[a] + step * delta[a];
            cand_eta = etas(X, cand);
            if (link != LinkKind::gev || gev_feasible(xi, cand_eta)) {
                cand_ll = log_likelihood(link, xi, cand_eta, y);
                if (std::isfinite(cand_ll) && cand_ll >= ll) {
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!improved) break;  // no ascent direction left

        double max_beta = 0.0;
        for (std::size_t a = 0; a < k; ++a) max_beta = std::max(max_beta, std::fabs(cand[a]));
        beta = cand;
        eta = std::move(cand_eta);
        const double gain = cand_ll - ll;
        ll = cand_ll;

        if (max_beta > kCoefExplosion) {
            if (!cfg.ridge_fallback) {
                if (perfectly_separated(eta, y)) {
                    throw SeparationError("perfect separation detected");
                }
                throw NumericError("coefficients diverged");
            }
            ridge_active = true;
        }
        if (gain < cfg.tol) {
            ++iter;
            break;
        }
    }

    for (double b : beta) {
        if (!std::isfinite(b)) throw NumericError("non-finite coefficients");
    }

    LinearBinaryModel lm;
    lm.link = link;
    lm.beta = beta;
    lm.gev_tail = link == LinkKind::gev ? xi : 0.0;
    lm.iterations = iter;
    lm.final_log_lik = ll;
    lm.ridge_used = ridge_active;
    return lm;
}

// Stratified seeded 70/30 split used only for the internal xi search.
void stratified_split(const Dataset& d, std::uint64_t seed, std::vector<std::size_t>& fit_idx,
                      std::vector<std::size_t>& val_idx) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < d.n(); ++i) (d.labels[i] == 1 ? pos : neg).push_back(i);
    auto rng = make_rng(mix_seed(seed, 0x9ec));
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    const auto take = [&](std::vector<std::size_t>& cls) {
        const auto nv = std::max<std::size_t>(1, cls.size() * 3 / 10);
        val_idx.insert(val_idx.end(), cls.begin(), cls.begin() + nv);
        fit_idx.insert(fit_idx.end(), cls.begin() + nv, cls.end());
    };
    take(pos);
    take(neg);
    std::sort(fit_idx.begin(), fit_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
}

}  // namespace

FittedModel fit_linear(const Dataset& d, LinkKind link, const LinearFitConfig& cfg) {
    d.validate();
    const auto n_pos = std::count(d.labels.begin(), d.labels.end(), 1);
    if (n_pos == 0 || static_cast<std::size_t>(n_pos) == d.n()) {
        throw DataError("fit_linear needs both classes");
    }
    if (!cfg.intercept_only) {
        for (std::size_t j = 0; j < d.p(); ++j) {
            double lo = d.features(0, j), hi = lo;
            for (std::size_t i = 1; i < d.n(); ++i) {
                lo = std::min(lo, d.features(i, j));
                hi = std::max(hi, d.features(i, j));
            }
            if (lo == hi) {
                throw DataError("feature '" + d.feature_names[j] +
                                "' is constant (duplicates the intercept)");
            }
        }
    }

    double xi = 0.0;
    if (link == LinkKind::gev) {
        if (cfg.gev_xi) {
            xi = *cfg.gev_xi;
        } else {
            if (cfg.gev_xi_grid.empty()) throw ConfigError("empty gev xi grid");
            std::vector<std::size_t> fit_idx, val_idx;
            stratified_split(d, cfg.seed, fit_idx, val_idx);
            const Dataset sub = d.select_rows(fit_idx);
            const Dataset val = d.select_rows(val_idx);
            double best_auc = -1.0;
            bool any = false;
            for (double candidate : cfg.gev_xi_grid) {
                try {
                    const LinearBinaryModel lm = fit_fixed_link(sub, link, candidate, cfg);
                    FittedModel tmp;
                    tmp.family = ModelFamily::gev;
                    tmp.params = lm;
                    tmp.feature_names = d.feature_names;
                    tmp.log_transformed = d.log_transformed;
                    const double a = auc(predict_proba(tmp, val.features), val.labels);
                    if (a > best_auc) {
                        best_auc = a;
                        xi = candidate;
                        any = true;
                    }
                } catch (const NumericError&) {
                    // candidate tail failed to fit; skip it
                }
            }
            if (!any) throw NumericError("no gev tail candidate converged");
        }
    }

    FittedModel m;
    m.family = link == LinkKind::logit   ? ModelFamily::lr
               : link == LinkKind::probit ? ModelFamily::probit
                                           : ModelFamily::gev;
    m.params = fit_fixed_link(d, link, xi, cfg);
    m.feature_names = d.feature_names;
    m.log_transformed = d.log_transformed;
    m.seed = cfg.seed;
    nlohmann::json config = {{"tol", cfg.tol},
                             {"max_iter", cfg.max_iter},
                             {"ridge_fallback", cfg.ridge_fallback},
                             {"ridge", cfg.ridge},
                             {"intercept_only", cfg.intercept_only}};
    if (link == LinkKind::gev) config["xi"] = xi;
    m.training_config_json = config.dump();
    return m;
}

}  // namespace credlens
