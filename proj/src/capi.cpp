#include "evsloc/evsloc.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "core/capture.hpp"
#include "core/channel.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/knn.hpp"
#include "core/mlp.hpp"

struct evsloc_scene {
    evs::Scene scene;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

/// Runs fn, translating exceptions into error codes + last-error message.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return EVSLOC_OK;
    } catch (const evs::ParseError& e) {
        return set_error(EVSLOC_E_PARSE, e.what());
    } catch (const evs::IoError& e) {
        return set_error(EVSLOC_E_IO, e.what());
    } catch (const evs::InvalidInput& e) {
        return set_error(EVSLOC_E_INVALID, e.what());
    } catch (const evs::Error& e) {
        return set_error(EVSLOC_E_RUNTIME, e.what());
    } catch (const std::exception& e) {
        return set_error(EVSLOC_E_RUNTIME, e.what());
    } catch (...) {
        return set_error(EVSLOC_E_RUNTIME, "unknown error");
    }
}

int require(bool ok, const char* what) {
    if (ok) return EVSLOC_OK;
    return set_error(EVSLOC_E_INVALID, std::string("null or invalid argument: ") + what);
}

evs::TrainConfig to_train_config(const evsloc_train_params& p) {
    evs::TrainConfig tc;
    tc.learning_rate = p.learning_rate;
    tc.momentum = p.momentum;
    tc.val_fraction = p.val_fraction;
    tc.batch_size = p.batch_size;
    tc.max_epochs = p.max_epochs;
    tc.patience = p.patience;
    tc.hidden.clear();
    if (p.hidden1 > 0) tc.hidden.push_back(p.hidden1);
    if (p.hidden2 > 0) tc.hidden.push_back(p.hidden2);
    tc.seed = p.seed;
    return tc;
}

evs::ExperimentParams to_experiment_params(const evsloc_experiment_params& p) {
    evs::ExperimentParams ep;
    ep.window = p.window;
    ep.order_hint = p.order_hint;
    ep.gamma_amp = p.gamma_amp;
    ep.gamma_phase = p.gamma_phase;
    ep.runs = p.runs;
    ep.seed = p.seed;
    ep.train = to_train_config(p.train);
    return ep;
}

void fill_confusion(const evs::ConfusionMatrix& cm, uint32_t* confusion, uint32_t cap,
                    uint32_t* num_classes_out) {
    if (num_classes_out) *num_classes_out = static_cast<uint32_t>(cm.num_classes);
    if (!confusion || cap == 0) return;
    const std::size_t n = std::min<std::size_t>(cm.num_classes, cap);
    std::fill(confusion, confusion + std::size_t(cap) * cap, 0u);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t p = 0; p < n; ++p) confusion[t * cap + p] = cm.at(t, p);
}

}  // namespace

extern "C" {

const char* evsloc_version(void) { return "0.1.0"; }

const char* evsloc_last_error(void) { return g_last_error.c_str(); }

int evsloc_scene_default(evsloc_scene** out) {
    if (int rc = require(out != nullptr, "out")) return rc;
    return guarded([&] { *out = new evsloc_scene{evs::default_scene()}; });
}

int evsloc_scene_load(const char* path, evsloc_scene** out) {
    if (int rc = require(path && out, "path/out")) return rc;
    return guarded([&] { *out = new evsloc_scene{evs::Scene::load(path)}; });
}

int evsloc_scene_save(const evsloc_scene* scene, const char* path) {
    if (int rc = require(scene && path, "scene/path")) return rc;
    return guarded([&] {
        const std::string tmp = std::string(path) + ".tmp";
        {
            std::ofstream outf(tmp, std::ios::binary);
            if (!outf) throw evs::IoError("cannot open for writing: " + tmp);
            outf << scene->scene.to_json() << "\n";
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) throw evs::IoError("rename failed: " + ec.message());
    });
}

int evsloc_scene_num_labels(const evsloc_scene* scene, uint32_t* out) {
    if (int rc = require(scene && out, "scene/out")) return rc;
    *out = static_cast<uint32_t>(scene->scene.num_labels());
    return EVSLOC_OK;
}

void evsloc_scene_free(evsloc_scene* scene) { delete scene; }

void evsloc_gen_params_init(evsloc_gen_params* p) {
    if (!p) return;
    p->train_per_label = 400;
    p->test_per_label = 100;
    p->snr_db = 20.0;
    p->cfo_hz = 0.0;
    p->order = 4;
    p->seed = 1;
}

int evsloc_generate(const evsloc_scene* scene, const evsloc_gen_params* params,
                    const char* out_stem) {
    if (int rc = require(scene && params && out_stem, "scene/params/out_stem")) return rc;
    return guarded([&] {
        evs::GenParams gp;
        gp.train_per_label = params->train_per_label;
        gp.test_per_label = params->test_per_label;
        gp.snr_db = params->snr_db;
        gp.cfo_hz = params->cfo_hz;
        gp.order = params->order;
        gp.seed = params->seed;
        evs::generate_dataset(scene->scene, evs::default_grid(), evs::default_layout(), gp, out_stem);
    });
}

int evsloc_capture_stat(const char* path, evsloc_capture_info* out) {
    if (int rc = require(path && out, "path/out")) return rc;
    return guarded([&] {
        evs::CaptureReader r(path);
        out->version = r.header().version;
        out->k = r.header().k;
        out->n_ltf = r.header().n_ltf;
        out->n_df = r.header().n_df;
        out->packet_count = r.header().packet_count;
        out->flags = r.header().flags;
    });
}

void evsloc_extract_params_init(evsloc_extract_params* p) {
    if (!p) return;
    p->kind = "evs-amp";
    p->gamma = 0;
    p->window = 50;
    p->order_hint = 0;
}

int evsloc_extract(const char* capture_path, const evsloc_extract_params* params,
                   const char* features_out) {
    if (int rc = require(capture_path && params && params->kind && features_out,
                         "capture_path/params/features_out"))
        return rc;
    return guarded([&] {
        evs::ExtractRequest req;
        req.kind = evs::feature_kind_from_name(params->kind);
        req.gamma = params->gamma;
        const auto sets =
            evs::extract_feature_sets(capture_path, {req}, params->window, params->order_hint);
        evs::write_features(features_out, sets.front());
    });
}

void evsloc_train_params_init(evsloc_train_params* p) {
    if (!p) return;
    p->learning_rate = 1e-3;
    p->momentum = 0.9;
    p->val_fraction = 0.1;
    p->batch_size = 64;
    p->max_epochs = 100;
    p->patience = 10;
    p->hidden1 = 128;
    p->hidden2 = 64;
    p->seed = 1;
}

int evsloc_train(const char* features_path, const evsloc_train_params* params,
                 const char* model_out, const char* history_out) {
    if (int rc = require(features_path && params && model_out, "features_path/params/model_out"))
        return rc;
    return guarded([&] {
        const evs::FeatureSet set = evs::read_features(features_path);
        const evs::TrainResult tr = evs::train_mlp(set, to_train_config(*params));
        evs::save_model(tr.model, model_out);
        if (history_out) {
            const std::string tmp = std::string(history_out) + ".tmp";
            std::FILE* f = std::fopen(tmp.c_str(), "wb");
            if (!f) throw evs::IoError("cannot open for writing: " + tmp);
            std::fprintf(f, "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n");
            for (const auto& e : tr.history) {
                std::fprintf(f, "%zu,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss,
                             e.train_accuracy, e.val_loss, e.val_accuracy);
            }
            if (std::fclose(f) != 0) throw evs::IoError("close failed on " + tmp);
            std::error_code ec;
            std::filesystem::rename(tmp, history_out, ec);
            if (ec) throw evs::IoError("rename failed: " + ec.message());
        }
    });
}

int evsloc_eval(const char* model_path, const char* features_path, double* accuracy,
                uint32_t* confusion, uint32_t num_classes_cap, uint32_t* num_classes_out) {
    if (int rc = require(model_path && features_path && accuracy, "model/features/accuracy"))
        return rc;
    return guarded([&] {
        const evs::MlpModel model = evs::load_model(model_path);
        const evs::FeatureSet set = evs::read_features(features_path);
        const evs::Prediction pred = evs::mlp_predict(model, set);
        *accuracy = pred.accuracy;
        fill_confusion(evs::confusion_matrix(set.labels, pred.labels), confusion, num_classes_cap,
                       num_classes_out);
    });
}

int evsloc_knn(const char* train_features, const char* test_features, uint32_t k, double* accuracy,
               uint32_t* confusion, uint32_t num_classes_cap, uint32_t* num_classes_out) {
    if (int rc = require(train_features && test_features && accuracy, "train/test/accuracy"))
        return rc;
    return guarded([&] {
        const evs::FeatureSet train = evs::read_features(train_features);
        const evs::FeatureSet test = evs::read_features(test_features);
        const evs::KnnResult res = evs::knn_predict(train, test, k);
        *accuracy = res.accuracy;
        fill_confusion(evs::confusion_matrix(test.labels, res.labels), confusion, num_classes_cap,
                       num_classes_out);
    });
}

void evsloc_experiment_params_init(evsloc_experiment_params* p) {
    if (!p) return;
    p->window = 50;
    p->order_hint = 0;
    p->gamma_amp = 4;
    p->gamma_phase = 6;
    p->runs = 5;
    p->seed = 1;
    evsloc_train_params_init(&p->train);
}

int evsloc_compare(const char* train_capture, const char* test_capture,
                   const evsloc_experiment_params* params, const char* results_out) {
    if (int rc = require(train_capture && test_capture && params && results_out,
                         "captures/params/results_out"))
        return rc;
    return guarded([&] {
        const auto rows =
            evs::compare_features(train_capture, test_capture, to_experiment_params(*params));
        evs::write_results(results_out, rows);
        evs::write_run_details(std::string(results_out) + ".runs.csv", rows);
    });
}

int evsloc_sweep_gamma(const char* train_capture, const char* test_capture, const char* kinds_csv,
                       const int* gammas, uint32_t n_gammas, const evsloc_experiment_params* params,
                       const char* results_out) {
    if (int rc = require(train_capture && test_capture && kinds_csv && gammas && n_gammas > 0 &&
                             params && results_out,
                         "captures/kinds/gammas/params/results_out"))
        return rc;
    return guarded([&] {
        std::vector<evs::FeatureKind> kinds;
        std::string s(kinds_csv);
        std::size_t start = 0;
        while (start <= s.size()) {
            const std::size_t pos = s.find(',', start);
            const std::string tok =
                pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start);
            if (!tok.empty()) kinds.push_back(evs::feature_kind_from_name(tok));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        const std::vector<int> gs(gammas, gammas + n_gammas);
        const auto rows = evs::sweep_gamma(train_capture, test_capture, kinds, gs,
                                           to_experiment_params(*params));
        evs::write_results(results_out, rows);
        evs::write_run_details(std::string(results_out) + ".runs.csv", rows);
    });
}

int evsloc_results_append(const char* path, const char* experiment, const char* kind, int gamma,
                          uint64_t seed, double accuracy, double std_dev) {
    if (int rc = require(path && experiment && kind, "path/experiment/kind")) return rc;
    return guarded([&] {
        evs::ResultRow row;
        row.experiment = experiment;
        row.kind = kind;
        row.gamma = gamma;
        row.seed = seed;
        row.accuracy = accuracy;
        row.accuracy_std = std_dev;
        evs::append_results(path, {row});
    });
}

}  // extern "C"
