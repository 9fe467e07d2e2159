#pragma once

#include <optional>
#include <vector>

#include "credlens/dataset.hpp"
#include "credlens/model.hpp"

namespace credlens {

struct LinearFitConfig {
    double tol = 1e-8;       // |delta log-likelihood| convergence threshold
    std::size_t max_iter = 100;
    bool ridge_fallback = true;
    double ridge = 1e-6;
    bool intercept_only = false;

    // gev link: fixed tail when set, otherwise searched over gev_xi_grid by
    // validation AUC on an internal seeded 70/30 split (xi = 0 is the Gumbel
    // limit).
    std::optional<double> gev_xi;
    std::vector<double> gev_xi_grid = default_xi_grid();
    std::uint64_t seed = 0;

    static std::vector<double> default_xi_grid();
};

/// Newton/Fisher-scoring fit of the Bernoulli log-likelihood under the chosen
/// link, with step halving; log-likelihood is non-decreasing across iterations.
FittedModel fit_linear(const Dataset& d, LinkKind link, const LinearFitConfig& config = {});

/// Inverse link pi(eta) and its derivative; exposed for tests.
double link_inverse(LinkKind link, double eta, double gev_tail);
double link_inverse_derivative(LinkKind link, double eta, double gev_tail);
/// eta with pi(eta) = p.
double link_forward(LinkKind link, double p, double gev_tail);

}  // namespace credlens
