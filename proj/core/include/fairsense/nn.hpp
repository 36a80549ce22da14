#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairsense/data.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Minimal feed-forward engine: seeded initialization, forward pass, Adam /
// binary-cross-entropy training, and exact reverse-mode gradients of the
// output probability with respect to the input vector.
// ---------------------------------------------------------------------------

enum class HiddenActivation { ReLU };
enum class OutputActivation { Sigmoid };

struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_widths;  // may be empty: single linear layer
    HiddenActivation hidden_activation = HiddenActivation::ReLU;
    OutputActivation output_activation = OutputActivation::Sigmoid;
    std::uint64_t seed = 0;

    void validate() const; // throws ConfigError
    bool operator==(const NetworkSpec&) const = default;
};

struct Layer {
    std::size_t out_dim = 0;
    std::size_t in_dim = 0;
    std::vector<double> weights; // row-major, out_dim x in_dim
    std::vector<double> bias;    // out_dim

    double weight(std::size_t r, std::size_t c) const { return weights[r * in_dim + c]; }
    double& weight(std::size_t r, std::size_t c) { return weights[r * in_dim + c]; }

    bool operator==(const Layer&) const = default;
};

struct NetworkParams {
    NetworkSpec spec;
    std::vector<Layer> layers; // hidden layers then the single output unit

    std::size_t input_dim() const { return spec.input_dim; }
    bool all_finite() const;
    bool operator==(const NetworkParams&) const = default;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t shuffle_seed = 0;

    void validate() const; // throws ConfigError
};

// Which column of a TabularDataset supplies the training target: the label
// (classifier F) or the protected column (protected-status model A).
enum class TrainTarget { Label, ProtectedAttribute };

std::string train_target_name(TrainTarget t);

// d(probability)/d(feature value), one entry per input coordinate.
using InputGradient = std::vector<double>;

struct TrainSummary {
    std::vector<double> epoch_loss; // mean BCE over the epoch's batches
};

// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)) seeded from
// NetworkSpec::seed; biases zero. Identical NetworkSpec (seed included)
// gives bit-identical parameters.
NetworkParams init_network(const NetworkSpec& spec);

// Sigmoid of the final pre-activation, clamped to the open interval (0, 1).
double forward(const NetworkParams& params, std::span<const double> x);

// Final pre-activation (the logit). Used by the numerically stable loss.
double forward_logit(const NetworkParams& params, std::span<const double> x);

// Hard class label at the 0.5 threshold.
inline bool hard_prediction(double probability) { return probability >= 0.5; }

// Mean binary cross entropy of the model on (rows, targets), computed from
// logits so saturated probabilities do not produce inf.
double bce_loss(const NetworkParams& params, const Matrix& rows,
                std::span<const double> targets);

// Mini-batch Adam on binary cross entropy. Deterministic given the config's
// shuffle seed. Throws DataError for a non-binary target column and
// NumericError (naming epoch and batch) if the loss goes non-finite.
NetworkParams train(NetworkParams params, const TabularDataset& data,
                    const TrainConfig& cfg, TrainTarget target,
                    TrainSummary* summary = nullptr);

// Lower-level entry point used by train(); targets must be 0/1.
NetworkParams train_on(NetworkParams params, const Matrix& rows,
                       std::span<const double> targets, const TrainConfig& cfg,
                       TrainSummary* summary = nullptr);

// Exact reverse-mode derivative of the post-sigmoid output with respect to
// each input coordinate. ReLU derivative at exactly 0 is taken as 0.
InputGradient input_gradient(const NetworkParams& params, std::span<const double> x);

// Fraction of rows whose hard prediction matches the target column.
double accuracy(const NetworkParams& params, const TabularDataset& data, TrainTarget target);

// Extracts the target column as doubles; throws DataError if any value is
// not exactly 0 or 1.
std::vector<double> target_values(const TabularDataset& data, TrainTarget target);

namespace detail {

// Adam state exposed for the zero-gradient no-op unit test.
struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    std::uint64_t step = 0;

    explicit AdamState(const NetworkParams& params);
    void update(NetworkParams& params, const std::vector<std::vector<double>>& grad_w,
                const std::vector<std::vector<double>>& grad_b, const TrainConfig& cfg);
};

} // namespace detail

} // namespace fairsense
