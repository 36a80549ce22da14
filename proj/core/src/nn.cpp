#include "fairsense/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fairsense/errors.hpp"
#include "fairsense/rng.hpp"

namespace fairsense {

namespace {

// Largest double below 1. Forward output is clamped into the open unit
// interval so downstream code can rely on 0 < p < 1 even when the logit
// saturates.
constexpr double kOneMinusUlp = 1.0 - 0x1.0p-53;

double sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return std::clamp(p, std::numeric_limits<double>::min(), kOneMinusUlp);
}

// Stable BCE from the logit: max(z,0) - z*y + log1p(exp(-|z|)).
double bce_from_logit(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

void check_input_dim(const NetworkParams& params, std::size_t got) {
    if (got != params.spec.input_dim) {
        std::ostringstream msg;
        msg << "input has " << got << " values but the network expects "
            << params.spec.input_dim;
        throw InputError(msg.str());
    }
}

// Per-layer buffers reused across samples during training and gradient
// evaluation.
struct Workspace {
    std::vector<std::vector<double>> activations; // a[0] = x .. a[L] = output layer logit
    std::vector<std::vector<double>> preacts;     // z per layer
    std::vector<std::vector<double>> deltas;      // dL/dz per layer

    explicit Workspace(const NetworkParams& params) {
        activations.resize(params.layers.size() + 1);
        activations[0].resize(params.spec.input_dim);
        preacts.resize(params.layers.size());
        deltas.resize(params.layers.size());
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            preacts[l].resize(params.layers[l].out_dim);
            deltas[l].resize(params.layers[l].out_dim);
            activations[l + 1].resize(params.layers[l].out_dim);
        }
    }
};

// Runs the forward pass, filling activations and pre-activations. Returns
// the output logit. Hidden layers apply ReLU; the output stays linear.
double forward_trace(const NetworkParams& params, std::span<const double> x, Workspace& ws) {
    std::copy(x.begin(), x.end(), ws.activations[0].begin());
    const std::size_t n_layers = params.layers.size();
    for (std::size_t l = 0; l < n_layers; ++l) {
        const Layer& layer = params.layers[l];
        const std::vector<double>& in = ws.activations[l];
        std::vector<double>& z = ws.preacts[l];
        std::vector<double>& out = ws.activations[l + 1];
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            double acc = layer.bias[r];
            const double* w = layer.weights.data() + r * layer.in_dim;
            for (std::size_t c = 0; c < layer.in_dim; ++c) acc += w[c] * in[c];
            z[r] = acc;
            out[r] = (l + 1 < n_layers) ? std::max(acc, 0.0) : acc;
        }
    }
    return ws.preacts[n_layers - 1][0];
}

// Propagates dL/dz of the output unit back to dL/dz of every layer.
// ReLU derivative at exactly 0 is 0.
void backprop_deltas(const NetworkParams& params, Workspace& ws, double delta_out) {
    const std::size_t n_layers = params.layers.size();
    ws.deltas[n_layers - 1][0] = delta_out;
    for (std::size_t l = n_layers - 1; l > 0; --l) {
        const Layer& layer = params.layers[l];
        std::vector<double>& below = ws.deltas[l - 1];
        std::fill(below.begin(), below.end(), 0.0);
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            const double d = ws.deltas[l][r];
            if (d == 0.0) continue;
            const double* w = layer.weights.data() + r * layer.in_dim;
            for (std::size_t c = 0; c < layer.in_dim; ++c) below[c] += w[c] * d;
        }
        for (std::size_t c = 0; c < below.size(); ++c) {
            if (ws.preacts[l - 1][c] <= 0.0) below[c] = 0.0;
        }
    }
}

} // namespace

void NetworkSpec::validate() const {
    if (input_dim < 1) throw ConfigError("network input_dim must be >= 1");
    for (std::size_t w : hidden_widths) {
        if (w < 1) throw ConfigError("network hidden widths must be >= 1");
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0))
        throw ConfigError("adam_beta1 must be in (0, 1)");
    if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0))
        throw ConfigError("adam_beta2 must be in (0, 1)");
    if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
}

std::string train_target_name(TrainTarget t) {
    return t == TrainTarget::Label ? "label" : "protected";
}

bool NetworkParams::all_finite() const {
    for (const Layer& layer : layers) {
        for (double w : layer.weights)
            if (!std::isfinite(w)) return false;
        for (double b : layer.bias)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

NetworkParams init_network(const NetworkSpec& spec) {
    spec.validate();
    NetworkParams params;
    params.spec = spec;
    Rng rng(spec.seed);

    std::vector<std::size_t> dims;
    dims.push_back(spec.input_dim);
    dims.insert(dims.end(), spec.hidden_widths.begin(), spec.hidden_widths.end());
    dims.push_back(1);

    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.in_dim = dims[l];
        layer.out_dim = dims[l + 1];
        layer.weights.resize(layer.out_dim * layer.in_dim);
        layer.bias.assign(layer.out_dim, 0.0);
        const double limit =
            std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

double forward_logit(const NetworkParams& params, std::span<const double> x) {
    check_input_dim(params, x.size());
    Workspace ws(params);
    return forward_trace(params, x, ws);
}

double forward(const NetworkParams& params, std::span<const double> x) {
    return sigmoid(forward_logit(params, x));
}

InputGradient input_gradient(const NetworkParams& params, std::span<const double> x) {
    check_input_dim(params, x.size());
    Workspace ws(params);
    const double logit = forward_trace(params, x, ws);
    const double p = sigmoid(logit);
    backprop_deltas(params, ws, p * (1.0 - p));

    const Layer& first = params.layers.front();
    InputGradient grad(params.spec.input_dim, 0.0);
    for (std::size_t r = 0; r < first.out_dim; ++r) {
        const double d = ws.deltas[0][r];
        if (d == 0.0) continue;
        const double* w = first.weights.data() + r * first.in_dim;
        for (std::size_t c = 0; c < first.in_dim; ++c) grad[c] += w[c] * d;
    }
    return grad;
}

double bce_loss(const NetworkParams& params, const Matrix& rows,
                std::span<const double> targets) {
    double total = 0.0;
    for (std::size_t i = 0; i < rows.rows; ++i) {
        total += bce_from_logit(forward_logit(params, rows.row(i)), targets[i]);
    }
    return rows.rows == 0 ? 0.0 : total / static_cast<double>(rows.rows);
}

namespace detail {

AdamState::AdamState(const NetworkParams& params) {
    for (const Layer& layer : params.layers) {
        m_w.emplace_back(layer.weights.size(), 0.0);
        v_w.emplace_back(layer.weights.size(), 0.0);
        m_b.emplace_back(layer.bias.size(), 0.0);
        v_b.emplace_back(layer.bias.size(), 0.0);
    }
}

void AdamState::update(NetworkParams& params,
                       const std::vector<std::vector<double>>& grad_w,
                       const std::vector<std::vector<double>>& grad_b,
                       const TrainConfig& cfg) {
    ++step;
    const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
    const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
    auto apply = [&](std::vector<double>& value, std::vector<double>& m,
                     std::vector<double>& v, const std::vector<double>& g) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g[i];
            v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            value[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
        }
    };
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        apply(params.layers[l].weights, m_w[l], v_w[l], grad_w[l]);
        apply(params.layers[l].bias, m_b[l], v_b[l], grad_b[l]);
    }
}

} // namespace detail

NetworkParams train_on(NetworkParams params, const Matrix& rows,
                       std::span<const double> targets, const TrainConfig& cfg,
                       TrainSummary* summary) {
    cfg.validate();
    if (rows.rows == 0) throw DataError("training set is empty");
    if (rows.rows != targets.size())
        throw DataError("row/target count mismatch in training data");
    if (rows.cols != params.spec.input_dim)
        throw InputError("training data width does not match network input_dim");
    for (double t : targets) {
        if (t != 0.0 && t != 1.0)
            throw DataError("training target column is not binary {0,1}");
    }

    detail::AdamState adam(params);
    Workspace ws(params);
    std::vector<std::vector<double>> grad_w, grad_b;
    for (const Layer& layer : params.layers) {
        grad_w.emplace_back(layer.weights.size(), 0.0);
        grad_b.emplace_back(layer.bias.size(), 0.0);
    }

    std::vector<std::size_t> order(rows.rows);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(cfg.shuffle_seed);

    if (summary) summary->epoch_loss.clear();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size();
             start += cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            const double inv_batch = 1.0 / static_cast<double>(end - start);

            for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : grad_b) std::fill(g.begin(), g.end(), 0.0);

            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t row = order[k];
                const double y = targets[row];
                const double logit = forward_trace(params, rows.row(row), ws);
                const double p = sigmoid(logit);
                batch_loss += bce_from_logit(logit, y);
                backprop_deltas(params, ws, (p - y) * inv_batch);
                for (std::size_t l = 0; l < params.layers.size(); ++l) {
                    const Layer& layer = params.layers[l];
                    const std::vector<double>& in = ws.activations[l];
                    for (std::size_t r = 0; r < layer.out_dim; ++r) {
                        const double d = ws.deltas[l][r];
                        if (d == 0.0) continue;
                        double* gw = grad_w[l].data() + r * layer.in_dim;
                        for (std::size_t c = 0; c < layer.in_dim; ++c) gw[c] += d * in[c];
                        grad_b[l][r] += d;
                    }
                }
            }
            batch_loss *= inv_batch;
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "training loss became non-finite at epoch " << epoch
                    << ", batch " << batch_index;
                throw NumericError(msg.str());
            }
            epoch_loss += batch_loss * static_cast<double>(end - start);
            adam.update(params, grad_w, grad_b, cfg);
        }
        if (summary)
            summary->epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    if (!params.all_finite())
        throw NumericError("network parameters became non-finite during training");
    return params;
}

std::vector<double> target_values(const TabularDataset& data, TrainTarget target) {
    std::vector<double> values(data.n_rows());
    if (target == TrainTarget::Label) {
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
            if (data.labels[i] > 1) throw DataError("label column is not binary {0,1}");
            values[i] = static_cast<double>(data.labels[i]);
        }
    } else {
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
            const double v = data.protected_value(i);
            if (v != 0.0 && v != 1.0)
                throw DataError("protected column is not binary {0,1}");
            values[i] = v;
        }
    }
    return values;
}

NetworkParams train(NetworkParams params, const TabularDataset& data,
                    const TrainConfig& cfg, TrainTarget target, TrainSummary* summary) {
    const std::vector<double> targets = target_values(data, target);
    return train_on(std::move(params), data.features, targets, cfg, summary);
}

double accuracy(const NetworkParams& params, const TabularDataset& data,
                TrainTarget target) {
    const std::vector<double> targets = target_values(data, target);
    if (targets.empty()) throw InputError("accuracy over an empty dataset is undefined");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        const bool predicted = hard_prediction(forward(params, data.features.row(i)));
        if (predicted == (targets[i] == 1.0)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(targets.size());
}

} // namespace fairsense
