#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/features_io.hpp"

namespace evs {

/// SeLU constants (self-normalizing networks).
constexpr double kSeluLambda = 1.0507009873554805;
constexpr double kSeluAlpha = 1.6732632423543772;

double selu(double x);
double selu_derivative(double x);  // lambda for x > 0, lambda*alpha*e^x for x <= 0

/// Fully connected classifier: SeLU hidden layers, softmax output. Weights
/// are row-major (out x in). Carries the per-dimension standardization of
/// its training split and the feature kind it was trained on.
struct MlpModel {
    std::vector<std::size_t> dims;          // e.g. {52, 128, 64, 26}
    std::vector<std::vector<double>> weights;  // dims.size()-1 matrices
    std::vector<std::vector<double>> biases;
    std::string feature_kind;
    std::vector<double> feat_mean;
    std::vector<double> feat_std;

    std::size_t num_classes() const { return dims.back(); }
    std::size_t input_dim() const { return dims.front(); }

    void validate() const;
};

/// Class probabilities for a raw (unstandardized) input of length K.
std::vector<double> mlp_forward(const MlpModel& model, const std::vector<double>& x);

struct LossStats {
    std::uint64_t clamped = 0;  // times a probability hit the 1e-12 floor
};

/// Cross-entropy -log p[label], probability floored at 1e-12.
double cross_entropy(const std::vector<double>& probs, std::size_t label, LossStats* stats = nullptr);

struct MlpGradients {
    std::vector<std::vector<double>> d_weights;
    std::vector<std::vector<double>> d_biases;
};

/// Analytic gradients of cross_entropy(mlp_forward(x), label) for every
/// parameter. The input is standardized exactly as in mlp_forward.
MlpGradients mlp_backward(const MlpModel& model, const std::vector<double>& x, std::size_t label);

struct TrainConfig {
    double learning_rate = 1e-3;
    double momentum = 0.9;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 100;
    std::size_t patience = 10;  // early-stop epochs without val-loss improvement
    std::vector<std::size_t> hidden = {128, 64};
    double val_fraction = 0.1;
    std::uint64_t seed = 1;
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    MlpModel model;
    std::vector<EpochStats> history;
    LossStats loss_stats;
};

/// Mini-batch SGD with momentum. Deterministic given config.seed: seeded
/// fan-in-scaled normal initialization, seeded shuffle stream and a seeded
/// validation split carved from the training set. Keeps the weights of the
/// best validation epoch.
TrainResult train_mlp(const FeatureSet& train, const TrainConfig& config);

struct Prediction {
    std::vector<std::uint16_t> labels;
    double accuracy = 0.0;  // fraction correct against the set's labels
};

/// Argmax of the forward pass per row; ties toward the smaller class index.
/// Rejects sets whose kind differs from the model's training kind.
Prediction mlp_predict(const MlpModel& model, const FeatureSet& features);

void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace evs
