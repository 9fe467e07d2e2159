#include "credlens/fann.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace credlens {

namespace {

struct Gradients {
    Matrix hidden_weights;
    std::vector<double> hidden_bias;
    std::vector<double> output_weights;
    double output_bias = 0.0;

    explicit Gradients(const FeedforwardNet& net)
        : hidden_weights(net.hidden_size(), net.input_size()),
          hidden_bias(net.hidden_size(), 0.0),
          output_weights(net.hidden_size(), 0.0) {}

    void reset() {
        std::fill(hidden_weights.data.begin(), hidden_weights.data.end(), 0.0);
        std::fill(hidden_bias.begin(), hidden_bias.end(), 0.0);
        std::fill(output_weights.begin(), output_weights.end(), 0.0);
        output_bias = 0.0;
    }
};

// Accumulates mean cross-entropy and its parameter gradient over the given
// rows. Returns the mean loss.
double forward_backward(const FeedforwardNet& net, const Matrix& X, const std::vector<int>& y,
                        const std::vector<std::size_t>& rows, Gradients* grads) {
    const std::size_t p = net.input_size();
    const std::size_t m = net.hidden_size();
    const double inv = 1.0 / static_cast<double>(rows.size());
    std::vector<double> xs(p), act(m);
    double loss = 0.0;
    for (const std::size_t i : rows) {
        const double* r = X.row(i);
        for (std::size_t j = 0; j < p; ++j) xs[j] = (r[j] - net.input_mean[j]) / net.input_sd[j];
        double z = net.output_bias;
        for (std::size_t h = 0; h < m; ++h) {
            double s = net.hidden_bias[h];
            const double* w = net.hidden_weights.row(h);
            for (std::size_t j = 0; j < p; ++j) s += w[j] * xs[j];
            act[h] = sigmoid(s);
            z += net.output_weights[h] * act[h];
        }
        const double target = static_cast<double>(y[i]);
        loss += (log1pexp(z) - target * z) * inv;
        if (!grads) continue;
        const double dz = (sigmoid(z) - target) * inv;
        grads->output_bias += dz;
        for (std::size_t h = 0; h < m; ++h) {
            grads->output_weights[h] += dz * act[h];
            const double dq = dz * net.output_weights[h] * act[h] * (1.0 - act[h]);
            grads->hidden_bias[h] += dq;
            double* gw = grads->hidden_weights.row(h);
            for (std::size_t j = 0; j < p; ++j) gw[j] += dq * xs[j];
        }
    }
    return loss;
}

void apply_update(FeedforwardNet& net, const Gradients& grads, double lr) {
    for (std::size_t t = 0; t < net.hidden_weights.data.size(); ++t) {
        net.hidden_weights.data[t] -= lr * grads.hidden_weights.data[t];
    }
    for (std::size_t h = 0; h < net.hidden_size(); ++h) {
        net.hidden_bias[h] -= lr * grads.hidden_bias[h];
        net.output_weights[h] -= lr * grads.output_weights[h];
    }
    net.output_bias -= lr * grads.output_bias;
}

bool finite_params(const FeedforwardNet& net) {
    for (double v : net.hidden_weights.data) {
        if (!std::isfinite(v)) return false;
    }
    for (double v : net.hidden_bias) {
        if (!std::isfinite(v)) return false;
    }
    for (double v : net.output_weights) {
        if (!std::isfinite(v)) return false;
    }
    return std::isfinite(net.output_bias);
}

}  // namespace

FittedModel fit_fann(const Dataset& d, const FannConfig& cfg) {
    d.validate();
    if (cfg.hidden_size < 1) throw ConfigError("fann hidden_size must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("fann learning_rate must be > 0");
    if (cfg.batch_size < 1) throw ConfigError("fann batch_size must be >= 1");
    const auto n_pos = std::count(d.labels.begin(), d.labels.end(), 1);
    if (n_pos == 0 || static_cast<std::size_t>(n_pos) == d.n()) {
        throw DataError("fit_fann needs both classes");
    }

    const std::size_t n = d.n();
    const std::size_t p = d.p();
    FeedforwardNet net;
    net.input_mean.assign(p, 0.0);
    net.input_sd.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += d.features(i, j);
        net.input_mean[j] = s / static_cast<double>(n);
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = d.features(i, j) - net.input_mean[j];
            v += c * c;
        }
        net.input_sd[j] = std::sqrt(v / static_cast<double>(n));
        if (net.input_sd[j] == 0.0) net.input_sd[j] = 1.0;
    }

    auto rng = make_rng(cfg.seed);
    const double r = 1.0 / std::sqrt(static_cast<double>(p));
    std::uniform_real_distribution<double> init(-r, r);
    net.hidden_weights = Matrix(cfg.hidden_size, p);
    for (auto& w : net.hidden_weights.data) w = init(rng);
    net.hidden_bias.resize(cfg.hidden_size);
    for (auto& b : net.hidden_bias) b = init(rng);
    net.output_weights.resize(cfg.hidden_size);
    for (auto& w : net.output_weights) w = init(rng);
    net.output_bias = init(rng);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Gradients grads(net);
    std::vector<std::size_t> batch;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            batch.assign(order.begin() + start, order.begin() + end);
            grads.reset();
            const double loss = forward_backward(net, d.features, d.labels, batch, &grads);
            if (!std::isfinite(loss)) {
                throw NumericError("fann training diverged at epoch " + std::to_string(epoch));
            }
            apply_update(net, grads, cfg.learning_rate);
        }
        if (!finite_params(net)) {
            throw NumericError("fann training diverged at epoch " + std::to_string(epoch));
        }
    }

    FittedModel m;
    m.family = ModelFamily::fann;
    m.params = std::move(net);
    m.feature_names = d.feature_names;
    m.log_transformed = d.log_transformed;
    m.seed = cfg.seed;
    m.training_config_json = nlohmann::json{{"hidden_size", cfg.hidden_size},
                                            {"learning_rate", cfg.learning_rate},
                                            {"epochs", cfg.epochs},
                                            {"batch_size", cfg.batch_size},
                                            {"seed", cfg.seed}}
                                 .dump();
    return m;
}

std::vector<double> fann_get_params(const FeedforwardNet& net) {
    std::vector<double> out;
    out.reserve(net.hidden_weights.data.size() + 2 * net.hidden_size() + 1);
    out.insert(out.end(), net.hidden_weights.data.begin(), net.hidden_weights.data.end());
    out.insert(out.end(), net.hidden_bias.begin(), net.hidden_bias.end());
    out.insert(out.end(), net.output_weights.begin(), net.output_weights.end());
    out.push_back(net.output_bias);
    return out;
}

void fann_set_params(FeedforwardNet& net, const std::vector<double>& params) {
    const std::size_t nw = net.hidden_weights.data.size();
    const std::size_t m = net.hidden_size();
    if (params.size() != nw + 2 * m + 1) throw ConfigError("fann parameter vector size mismatch");
    std::copy(params.begin(), params.begin() + nw, net.hidden_weights.data.begin());
    std::copy(params.begin() + nw, params.begin() + nw + m, net.hidden_bias.begin());
    std::copy(params.begin() + nw + m, params.begin() + nw + 2 * m, net.output_weights.begin());
    net.output_bias = params.back();
}

double fann_loss(const FeedforwardNet& net, const Matrix& X, const std::vector<int>& y) {
    std::vector<std::size_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return forward_backward(net, X, y, rows, nullptr);
}

std::vector<double> fann_loss_gradient(const FeedforwardNet& net, const Matrix& X,
                                       const std::vector<int>& y) {
    std::vector<std::size_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Gradients grads(net);
    forward_backward(net, X, y, rows, &grads);
    std::vector<double> out;
    out.reserve(grads.hidden_weights.data.size() + 2 * net.hidden_size() + 1);
    out.insert(out.end(), grads.hidden_weights.data.begin(), grads.hidden_weights.data.end());
    out.insert(out.end(), grads.hidden_bias.begin(), grads.hidden_bias.end());
    out.insert(out.end(), grads.output_weights.begin(), grads.output_weights.end());
    out.push_back(grads.output_bias);
    return out;
}

}  // namespace credlens
