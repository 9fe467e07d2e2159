#pragma once

#include <vector>

#include "credlens/dataset.hpp"
#include "credlens/model.hpp"

namespace credlens {

struct FannConfig {
    std::size_t hidden_size = 16;
    double learning_rate = 0.01;
    std::size_t epochs = 200;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
};

/// Single-hidden-layer sigmoid network trained by seeded mini-batch gradient
/// descent on cross-entropy; inputs standardized with training mean/sd.
FittedModel fit_fann(const Dataset& d, const FannConfig& config = {});

// Flat parameter order: hidden weights row-major, hidden biases, output
// weights, output bias. Used by the finite-difference gradient check.
std::vector<double> fann_get_params(const FeedforwardNet& net);
void fann_set_params(FeedforwardNet& net, const std::vector<double>& params);

/// Mean cross-entropy over (X, y); X is raw (the net applies its own scaling).
double fann_loss(const FeedforwardNet& net, const Matrix& X, const std::vector<int>& y);
/// Analytic gradient of fann_loss in flat parameter order.
std::vector<double> fann_loss_gradient(const FeedforwardNet& net, const Matrix& X,
                                       const std::vector<int>& y);

}  // namespace credlens
