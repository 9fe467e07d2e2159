#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace credlens {

// Error taxonomy. The CLI maps these onto exit codes 1/2/3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Raised by the linear solver only when the ridge fallback is disabled.
struct SeparationError : NumericError {
    using NumericError::NumericError;
};

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
};

// ---------------------------------------------------------------------------
// Seeding
//
// Every unit of work (bootstrap replicate, MCCV iteration, grid cell, Shapley
// instance) derives its seed from (base seed, stable work-unit index), never
// from scheduling order. splitmix64 decorrelates consecutive derived seeds
// before they reach the engine.
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);
std::mt19937_64 make_rng(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Numerics
// ---------------------------------------------------------------------------

double sigmoid(double x);
/// log(1 + exp(x)) without overflow.
double log1pexp(double x);
double norm_pdf(double x);
double norm_cdf(double x);
/// Inverse standard normal CDF, |error| < 1e-13 over (0,1).
double norm_quantile(double p);
/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);
double beta_pdf(double x, double a, double b);

/// Linear-interpolation quantile of an ascending-sorted sample (R type 7).
double sorted_quantile(const std::vector<double>& sorted, double q);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

// ---------------------------------------------------------------------------
// Hashing / formatting
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(const void* bytes, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t h);

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

}  // namespace credlens
