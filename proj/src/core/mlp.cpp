#include "core/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace evs {

double selu(double x) {
    return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
}

double selu_derivative(double x) {
    return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}

void MlpModel::validate() const {
    if (dims.size() < 2) throw InvalidInput("model: need at least input and output layers");
    if (weights.size() != dims.size() - 1 || biases.size() != dims.size() - 1)
        throw InvalidInput("model: layer count mismatch");
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        if (weights[l].size() != dims[l] * dims[l + 1])
            throw InvalidInput("model: weight matrix " + std::to_string(l) + " has wrong shape");
        if (biases[l].size() != dims[l + 1])
            throw InvalidInput("model: bias vector " + std::to_string(l) + " has wrong shape");
    }
    if (feat_mean.size() != dims.front() || feat_std.size() != dims.front())
        throw InvalidInput("model: standardization vectors must match input dim");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (double w : weights[l])
            if (!std::isfinite(w)) throw InvalidInput("model: non-finite weight");
        for (double b : biases[l])
            if (!std::isfinite(b)) throw InvalidInput("model: non-finite bias");
    }
}

namespace {

struct Workspace {
    // act[0] is the standardized input; act[l] the activation of layer l.
    std::vector<std::vector<double>> act;
    std::vector<std::vector<double>> pre;    // pre-activations per non-input layer
    std::vector<std::vector<double>> delta;  // back-propagated errors

    void resize(const std::vector<std::size_t>& dims) {
        act.resize(dims.size());
        pre.resize(dims.size() - 1);
        delta.resize(dims.size() - 1);
        for (std::size_t i = 0; i < dims.size(); ++i) act[i].resize(dims[i]);
        for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
            pre[i].resize(dims[i + 1]);
            delta[i].resize(dims[i + 1]);
        }
    }
};

void standardize_into(const MlpModel& m, const double* x, std::vector<double>& out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x[i] - m.feat_mean[i]) / m.feat_std[i];
}

/// Forward pass on an already standardized input stored in ws.act[0].
/// Leaves class probabilities in ws.act.back().
void forward_into(const MlpModel& m, Workspace& ws) {
    const std::size_t layers = m.dims.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in_n = m.dims[l];
        const std::size_t out_n = m.dims[l + 1];
        const double* w = m.weights[l].data();
        const double* a_in = ws.act[l].data();
        double* z = ws.pre[l].data();
        for (std::size_t o = 0; o < out_n; ++o) {
            const double* wr = w + o * in_n;
            double acc = m.biases[l][o];
            for (std::size_t i = 0; i < in_n; ++i) acc += wr[i] * a_in[i];
            z[o] = acc;
        }
        double* a_out = ws.act[l + 1].data();
        if (l != layers - 1) {
            for (std::size_t o = 0; o < out_n; ++o) a_out[o] = selu(z[o]);
        } else {
            // softmax with max subtraction
            double mx = z[0];
            for (std::size_t o = 1; o < out_n; ++o) mx = std::max(mx, z[o]);
            double sum = 0.0;
            for (std::size_t o = 0; o < out_n; ++o) {
                a_out[o] = std::exp(z[o] - mx);
                sum += a_out[o];
            }
            for (std::size_t o = 0; o < out_n; ++o) a_out[o] /= sum;
        }
    }
}

/// Accumulates dL/dparam for the sample currently held in ws (after
/// forward_into), scaled by `scale`.
void backward_accumulate(const MlpModel& m, Workspace& ws, std::size_t label, double scale,
                         MlpGradients& grads) {
    const std::size_t layers = m.dims.size() - 1;
    // output layer: softmax + cross-entropy
    {
        const std::size_t out_n = m.dims.back();
        const double* p = ws.act.back().data();
        double* d = ws.delta[layers - 1].data();
        for (std::size_t o = 0; o < out_n; ++o) d[o] = p[o] - (o == label ? 1.0 : 0.0);
    }
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in_n = m.dims[l];
        const std::size_t out_n = m.dims[l + 1];
        const double* d = ws.delta[l].data();
        const double* a_in = ws.act[l].data();
        double* dw = grads.d_weights[l].data();
        double* db = grads.d_biases[l].data();
        for (std::size_t o = 0; o < out_n; ++o) {
            const double g = d[o] * scale;
            db[o] += g;
            double* dwr = dw + o * in_n;
            for (std::size_t i = 0; i < in_n; ++i) dwr[i] += g * a_in[i];
        }
        if (l == 0) break;
        // propagate to the previous (SeLU) layer
        const double* w = m.weights[l].data();
        double* d_prev = ws.delta[l - 1].data();
        const double* z_prev = ws.pre[l - 1].data();
        for (std::size_t i = 0; i < in_n; ++i) d_prev[i] = 0.0;
        for (std::size_t o = 0; o < out_n; ++o) {
            const double g = d[o];
            const double* wr = w + o * in_n;
            for (std::size_t i = 0; i < in_n; ++i) d_prev[i] += g * wr[i];
        }
        for (std::size_t i = 0; i < in_n; ++i) d_prev[i] *= selu_derivative(z_prev[i]);
    }
}

MlpGradients zero_gradients(const MlpModel& m) {
    MlpGradients g;
    g.d_weights.resize(m.weights.size());
    g.d_biases.resize(m.biases.size());
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        g.d_weights[l].assign(m.weights[l].size(), 0.0);
        g.d_biases[l].assign(m.biases[l].size(), 0.0);
    }
    return g;
}

}  // namespace

std::vector<double> mlp_forward(const MlpModel& model, const std::vector<double>& x) {
    if (x.size() != model.input_dim()) throw InvalidInput("forward: input length mismatch");
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidInput("forward: non-finite input");
    }
    Workspace ws;
    ws.resize(model.dims);
    standardize_into(model, x.data(), ws.act[0]);
    forward_into(model, ws);
    return ws.act.back();
}

double cross_entropy(const std::vector<double>& probs, std::size_t label, LossStats* stats) {
    if (label >= probs.size()) throw InvalidInput("loss: label out of range");
    double p = probs[label];
    if (p < 1e-12) {
        p = 1e-12;
        if (stats) ++stats->clamped;
    }
    return -std::log(p);
}

MlpGradients mlp_backward(const MlpModel& model, const std::vector<double>& x, std::size_t label) {
    if (x.size() != model.input_dim()) throw InvalidInput("backward: input length mismatch");
    if (label >= model.num_classes()) throw InvalidInput("backward: label out of range");
    Workspace ws;
    ws.resize(model.dims);
    standardize_into(model, x.data(), ws.act[0]);
    forward_into(model, ws);
    MlpGradients grads = zero_gradients(model);
    backward_accumulate(model, ws, label, 1.0, grads);
    return grads;
}

TrainResult train_mlp(const FeatureSet& train, const TrainConfig& config) {
    if (train.size() == 0) throw InvalidInput("train: empty dataset");
    if (config.learning_rate < 0.0 || config.momentum < 0.0)
        throw InvalidInput("train: negative hyperparameter");
    if (config.batch_size == 0) throw InvalidInput("train: batch_size must be positive");

    std::uint16_t max_label = 0;
    for (std::uint16_t l : train.labels) max_label = std::max(max_label, l);
    const std::size_t num_classes = std::size_t(max_label) + 1;
    if (num_classes < 2) throw InvalidInput("train: need at least two classes");

    // validation split
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    RngStream split_rng = RngStream::derive(config.seed, {0x76616c73ULL});  // "vals"
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = split_rng.uniform_int(i);
        std::swap(order[i - 1], order[j]);
    }
    std::size_t n_val = static_cast<std::size_t>(config.val_fraction * static_cast<double>(order.size()));
    if (config.val_fraction > 0.0 && n_val == 0) n_val = 1;
    if (n_val >= order.size()) throw InvalidInput("train: validation fraction leaves no train data");
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());

    if (config.batch_size > train_idx.size())
        throw InvalidInput("train: batch_size " + std::to_string(config.batch_size) +
                           " exceeds training split size " + std::to_string(train_idx.size()));

    // standardization from the training split only
    MlpModel model;
    model.dims.push_back(train.dim);
    for (std::size_t h : config.hidden) model.dims.push_back(h);
    model.dims.push_back(num_classes);
    model.feature_kind = feature_kind_name(train.kind);
    model.feat_mean.assign(train.dim, 0.0);
    model.feat_std.assign(train.dim, 0.0);
    for (std::size_t i : train_idx) {
        const double* row = train.row(i);
        for (std::size_t c = 0; c < train.dim; ++c) model.feat_mean[c] += row[c];
    }
    for (double& v : model.feat_mean) v /= static_cast<double>(train_idx.size());
    for (std::size_t i : train_idx) {
        const double* row = train.row(i);
        for (std::size_t c = 0; c < train.dim; ++c) {
            const double d = row[c] - model.feat_mean[c];
            model.feat_std[c] += d * d;
        }
    }
    for (double& v : model.feat_std) {
        v = std::sqrt(v / static_cast<double>(train_idx.size()));
        if (v < 1e-12) v = 1.0;  // constant feature: leave it centered
    }

    // fan-in-scaled normal init, zero biases
    model.weights.resize(model.dims.size() - 1);
    model.biases.resize(model.dims.size() - 1);
    for (std::size_t l = 0; l + 1 < model.dims.size(); ++l) {
        RngStream wrng = RngStream::derive(config.seed, {0x77696e69ULL, l});  // "wini"
        const std::size_t fan_in = model.dims[l];
        const double sigma = 1.0 / std::sqrt(static_cast<double>(fan_in));
        model.weights[l].resize(fan_in * model.dims[l + 1]);
        for (double& w : model.weights[l]) w = wrng.gaussian() * sigma;
        model.biases[l].assign(model.dims[l + 1], 0.0);
    }

    TrainResult result;
    Workspace ws;
    ws.resize(model.dims);
    MlpGradients grads = zero_gradients(model);
    MlpGradients velocity = zero_gradients(model);

    const bool use_val = !val_idx.empty();
    double best_val_loss = std::numeric_limits<double>::infinity();
    MlpModel best_model = model;
    std::size_t since_best = 0;

    auto evaluate = [&](const std::vector<std::size_t>& idx, double& loss, double& acc) {
        loss = 0.0;
        std::size_t correct = 0;
        for (std::size_t i : idx) {
            standardize_into(model, train.row(i), ws.act[0]);
            forward_into(model, ws);
            loss += cross_entropy(ws.act.back(), train.labels[i], &result.loss_stats);
            std::size_t arg = 0;
            for (std::size_t c = 1; c < num_classes; ++c)
                if (ws.act.back()[c] > ws.act.back()[arg]) arg = c;
            if (arg == train.labels[i]) ++correct;
        }
        loss /= static_cast<double>(idx.size());
        acc = static_cast<double>(correct) / static_cast<double>(idx.size());
    };

    std::vector<std::size_t> shuffled = train_idx;
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        RngStream ep_rng = RngStream::derive(config.seed, {0x73687566ULL, epoch});  // "shuf"
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            const std::size_t j = ep_rng.uniform_int(i);
            std::swap(shuffled[i - 1], shuffled[j]);
        }

        double epoch_loss = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < shuffled.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, shuffled.size());
            const double scale = 1.0 / static_cast<double>(end - start);
            for (auto& g : grads.d_weights) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : grads.d_biases) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t s = start; s < end; ++s) {
                const std::size_t i = shuffled[s];
                standardize_into(model, train.row(i), ws.act[0]);
                forward_into(model, ws);
                epoch_loss += cross_entropy(ws.act.back(), train.labels[i], &result.loss_stats);
                std::size_t arg = 0;
                for (std::size_t c = 1; c < num_classes; ++c)
                    if (ws.act.back()[c] > ws.act.back()[arg]) arg = c;
                if (arg == train.labels[i]) ++correct;
                backward_accumulate(model, ws, train.labels[i], scale, grads);
            }
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
                    velocity.d_weights[l][i] = config.momentum * velocity.d_weights[l][i] -
                                               config.learning_rate * grads.d_weights[l][i];
                    model.weights[l][i] += velocity.d_weights[l][i];
                }
                for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
                    velocity.d_biases[l][i] = config.momentum * velocity.d_biases[l][i] -
                                              config.learning_rate * grads.d_biases[l][i];
                    model.biases[l][i] += velocity.d_biases[l][i];
                }
            }
        }

        EpochStats es;
        es.epoch = epoch;
        es.train_loss = epoch_loss / static_cast<double>(shuffled.size());
        es.train_accuracy = static_cast<double>(correct) / static_cast<double>(shuffled.size());
        if (use_val) {
            evaluate(val_idx, es.val_loss, es.val_accuracy);
            if (es.val_loss < best_val_loss) {
                best_val_loss = es.val_loss;
                best_model = model;
                since_best = 0;
            } else {
                ++since_best;
            }
        } else {
            es.val_loss = std::numeric_limits<double>::quiet_NaN();
            es.val_accuracy = std::numeric_limits<double>::quiet_NaN();
        }
        result.history.push_back(es);
        if (use_val && since_best >= config.patience) break;
    }

    result.model = use_val ? best_model : model;
    return result;
}

Prediction mlp_predict(const MlpModel& model, const FeatureSet& features) {
    if (feature_kind_name(features.kind) != model.feature_kind)
        throw InvalidInput("predict: feature kind '" + std::string(feature_kind_name(features.kind)) +
                           "' does not match model kind '" + model.feature_kind + "'");
    if (features.dim != model.input_dim()) throw InvalidInput("predict: feature dimension mismatch");

    Workspace ws;
    ws.resize(model.dims);
    Prediction out;
    out.labels.resize(features.size());
    std::size_t correct = 0;
    for (std::size_t r = 0; r < features.size(); ++r) {
        standardize_into(model, features.row(r), ws.act[0]);
        forward_into(model, ws);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < model.num_classes(); ++c)
            if (ws.act.back()[c] > ws.act.back()[arg]) arg = c;
        out.labels[r] = static_cast<std::uint16_t>(arg);
        if (arg == features.labels[r]) ++correct;
    }
    out.accuracy = features.size() ? static_cast<double>(correct) / static_cast<double>(features.size()) : 0.0;
    return out;
}

void save_model(const MlpModel& model, const std::string& path) {
    nlohmann::json j;
    j["layer_dims"] = model.dims;
    j["activation"] = {{"type", "selu"}, {"lambda", kSeluLambda}, {"alpha", kSeluAlpha}};
    j["output"] = "softmax";
    j["feature_kind"] = model.feature_kind;
    j["feat_mean"] = model.feat_mean;
    j["feat_std"] = model.feat_std;
    j["weights"] = model.weights;
    j["biases"] = model.biases;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out << j.dump(1);
        if (!out) throw IoError("short write on " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what(), e.byte);
    }
    MlpModel m;
    try {
        m.dims = j.at("layer_dims").get<std::vector<std::size_t>>();
        m.feature_kind = j.at("feature_kind").get<std::string>();
        m.feat_mean = j.at("feat_mean").get<std::vector<double>>();
        m.feat_std = j.at("feat_std").get<std::vector<double>>();
        m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
    m.validate();
    return m;
}

}  // namespace evs
