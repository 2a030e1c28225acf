// Command-line front end for the evsloc shared library. Talks to the
// library exclusively through the public C interface.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evsloc/evsloc.h"

namespace {

int fail(const char* what) {
    std::fprintf(stderr, "evsloc: %s: %s\n", what, evsloc_last_error());
    return 1;
}

void print_confusion(const std::vector<uint32_t>& confusion, uint32_t cap, uint32_t n) {
    std::printf("confusion (rows = true label, cols = predicted):\n");
    for (uint32_t t = 0; t < n; ++t) {
        std::printf("%3u:", t);
        for (uint32_t p = 0; p < n; ++p) std::printf(" %5u", confusion[t * cap + p]);
        std::printf("\n");
    }
}

struct GenArgs {
    std::string scene_path;
    std::string out_stem;
    evsloc_gen_params params{};
};

int run_gen(const GenArgs& a) {
    evsloc_scene* scene = nullptr;
    int rc = a.scene_path.empty() ? evsloc_scene_default(&scene)
                                  : evsloc_scene_load(a.scene_path.c_str(), &scene);
    if (rc != EVSLOC_OK) return fail("scene");
    uint32_t labels = 0;
    evsloc_scene_num_labels(scene, &labels);
    rc = evsloc_generate(scene, &a.params, a.out_stem.c_str());
    evsloc_scene_free(scene);
    if (rc != EVSLOC_OK) return fail("gen");
    for (uint32_t l = 0; l < labels; ++l) {
        std::printf("label %2u: %u train + %u test packets\n", l, a.params.train_per_label,
                    a.params.test_per_label);
    }
    std::printf("total: %u labels, %u train, %u test -> %s.train.evsc / %s.test.evsc\n", labels,
                labels * a.params.train_per_label, labels * a.params.test_per_label,
                a.out_stem.c_str(), a.out_stem.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"error-vector-spectrum pipeline: capture synthesis, feature extraction, "
                 "classifier training and experiments"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // ---- gen ----
    GenArgs gen;
    evsloc_gen_params_init(&gen.params);
    auto* cmd_gen = app.add_subcommand("gen", "simulate labeled captures (train/test split)");
    cmd_gen->add_option("--scene", gen.scene_path, "scene config (json); built-in default if omitted");
    cmd_gen->add_option("--out", gen.out_stem, "output stem; writes <stem>.train.evsc and <stem>.test.evsc")
        ->required();
    cmd_gen->add_option("--train-per-label", gen.params.train_per_label, "packets per label, train split");
    cmd_gen->add_option("--test-per-label", gen.params.test_per_label, "packets per label, test split");
    cmd_gen->add_option("--snr-db", gen.params.snr_db, "SNR in dB; inf disables noise");
    cmd_gen->add_option("--cfo-hz", gen.params.cfo_hz, "carrier frequency offset in Hz");
    cmd_gen->add_option("--order", gen.params.order, "modulation order (2|4|16|64)");
    cmd_gen->add_option("--seed", gen.params.seed, "generation seed");

    // ---- extract ----
    std::string ex_in, ex_kind = "evs-amp", ex_out;
    evsloc_extract_params ex_params{};
    evsloc_extract_params_init(&ex_params);
    uint64_t ex_seed = 1;
    auto* cmd_extract = app.add_subcommand("extract", "turn a capture into a feature table");
    cmd_extract->add_option("--in", ex_in, "capture file")->required();
    cmd_extract->add_option("--kind", ex_kind, "csi-amp|csi-phase|evs-amp|evs-phase")->required();
    cmd_extract->add_option("--gamma", ex_params.gamma, "calibration exponent (EVS kinds)");
    cmd_extract->add_option("--window", ex_params.window, "per-label calibration window length");
    cmd_extract->add_option("--order-hint", ex_params.order_hint,
                            "fixed modulation order; 0 = per packet, -1 = session majority vote");
    cmd_extract->add_option("--out", ex_out, "output feature file (csv)")->required();
    cmd_extract->add_option("--seed", ex_seed, "unused; extraction is deterministic");

    // ---- train ----
    std::string tr_features, tr_model_out, tr_history_out, tr_hidden = "128,64";
    evsloc_train_params tr_params{};
    evsloc_train_params_init(&tr_params);
    auto* cmd_train = app.add_subcommand("train", "train the feature classifier");
    cmd_train->add_option("--features", tr_features, "training feature file")->required();
    cmd_train->add_option("--val-frac", tr_params.val_fraction, "validation fraction for early stopping");
    cmd_train->add_option("--hidden", tr_hidden, "hidden layer sizes, e.g. 128,64 or none");
    cmd_train->add_option("--epochs", tr_params.max_epochs, "maximum epochs");
    cmd_train->add_option("--lr", tr_params.learning_rate, "learning rate");
    cmd_train->add_option("--momentum", tr_params.momentum, "SGD momentum");
    cmd_train->add_option("--batch", tr_params.batch_size, "mini-batch size");
    cmd_train->add_option("--patience", tr_params.patience, "early-stop patience (epochs)");
    cmd_train->add_option("--seed", tr_params.seed, "training seed");
    cmd_train->add_option("--model-out", tr_model_out, "output model file (json)")->required();
    cmd_train->add_option("--history-out", tr_history_out,
                          "epoch history csv (default: <model-out>.history.csv)");

    // ---- eval ----
    std::string ev_model, ev_features, ev_results;
    uint64_t ev_seed = 1;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a trained model on a feature file");
    cmd_eval->add_option("--model", ev_model, "model file")->required();
    cmd_eval->add_option("--features", ev_features, "feature file")->required();
    cmd_eval->add_option("--results", ev_results, "append accuracy to this results table");
    cmd_eval->add_option("--seed", ev_seed, "unused; evaluation is deterministic");

    // ---- knn ----
    std::string knn_train, knn_test, knn_results;
    uint32_t knn_k = 5;
    uint64_t knn_seed = 1;
    auto* cmd_knn = app.add_subcommand("knn", "k-nearest-neighbor baseline");
    cmd_knn->add_option("--train", knn_train, "training feature file")->required();
    cmd_knn->add_option("--test", knn_test, "test feature file")->required();
    cmd_knn->add_option("--k", knn_k, "neighbor count")->required();
    cmd_knn->add_option("--results", knn_results, "append accuracy to this results table");
    cmd_knn->add_option("--seed", knn_seed, "unused; knn is deterministic");

    // ---- sweep-gamma ----
    std::string sw_stem, sw_kinds = "evs-amp,evs-phase", sw_results;
    std::string sw_gammas = "0,2,4,6,8";
    evsloc_experiment_params sw_params{};
    evsloc_experiment_params_init(&sw_params);
    auto* cmd_sweep = app.add_subcommand("sweep-gamma", "accuracy across calibration exponents");
    cmd_sweep->add_option("--in", sw_stem, "capture stem from gen")->required();
    cmd_sweep->add_option("--kinds", sw_kinds, "comma-separated EVS kinds");
    cmd_sweep->add_option("--gammas", sw_gammas, "comma-separated gamma values");
    cmd_sweep->add_option("--runs", sw_params.runs, "training runs per configuration");
    cmd_sweep->add_option("--window", sw_params.window, "calibration window length");
    cmd_sweep->add_option("--order-hint", sw_params.order_hint,
                          "fixed modulation order; 0 = per packet, -1 = session vote");
    cmd_sweep->add_option("--epochs", sw_params.train.max_epochs, "maximum training epochs");
    cmd_sweep->add_option("--seed", sw_params.seed, "experiment seed");
    cmd_sweep->add_option("--results", sw_results, "output results table")->required();

    // ---- compare ----
    std::string cp_stem, cp_results;
    evsloc_experiment_params cp_params{};
    evsloc_experiment_params_init(&cp_params);
    auto* cmd_compare = app.add_subcommand("compare", "all four feature kinds, identical classifier");
    cmd_compare->add_option("--in", cp_stem, "capture stem from gen")->required();
    cmd_compare->add_option("--runs", cp_params.runs, "training runs per kind");
    cmd_compare->add_option("--gamma-amp", cp_params.gamma_amp, "calibration for evs-amp");
    cmd_compare->add_option("--gamma-phase", cp_params.gamma_phase, "calibration for evs-phase");
    cmd_compare->add_option("--window", cp_params.window, "calibration window length");
    cmd_compare->add_option("--order-hint", cp_params.order_hint,
                            "fixed modulation order; 0 = per packet, -1 = session vote");
    cmd_compare->add_option("--epochs", cp_params.train.max_epochs, "maximum training epochs");
    cmd_compare->add_option("--seed", cp_params.seed, "experiment seed");
    cmd_compare->add_option("--results", cp_results, "output results table")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (app.got_subcommand(cmd_gen)) return run_gen(gen);

    if (app.got_subcommand(cmd_extract)) {
        ex_params.kind = ex_kind.c_str();
        if (evsloc_extract(ex_in.c_str(), &ex_params, ex_out.c_str()) != EVSLOC_OK)
            return fail("extract");
        std::printf("wrote %s (%s, gamma=%d, window=%u)\n", ex_out.c_str(), ex_kind.c_str(),
                    ex_params.gamma, ex_params.window);
        return 0;
    }

    if (app.got_subcommand(cmd_train)) {
        if (tr_hidden == "none" || tr_hidden == "0") {
            tr_params.hidden1 = tr_params.hidden2 = 0;
        } else {
            unsigned h1 = 0, h2 = 0;
            const int n = std::sscanf(tr_hidden.c_str(), "%u,%u", &h1, &h2);
            if (n < 1) {
                std::fprintf(stderr, "evsloc: bad --hidden '%s'\n", tr_hidden.c_str());
                return 2;
            }
            tr_params.hidden1 = h1;
            tr_params.hidden2 = n >= 2 ? h2 : 0;
        }
        const std::string history =
            tr_history_out.empty() ? tr_model_out + ".history.csv" : tr_history_out;
        if (evsloc_train(tr_features.c_str(), &tr_params, tr_model_out.c_str(), history.c_str()) !=
            EVSLOC_OK)
            return fail("train");
        std::printf("wrote %s and %s\n", tr_model_out.c_str(), history.c_str());
        return 0;
    }

    if (app.got_subcommand(cmd_eval) || app.got_subcommand(cmd_knn)) {
        const bool is_eval = app.got_subcommand(cmd_eval);
        constexpr uint32_t kCap = 64;
        std::vector<uint32_t> confusion(kCap * kCap, 0);
        double accuracy = 0.0;
        uint32_t n_classes = 0;
        int rc;
        if (is_eval) {
            rc = evsloc_eval(ev_model.c_str(), ev_features.c_str(), &accuracy, confusion.data(),
                             kCap, &n_classes);
        } else {
            rc = evsloc_knn(knn_train.c_str(), knn_test.c_str(), knn_k, &accuracy, confusion.data(),
                            kCap, &n_classes);
        }
        if (rc != EVSLOC_OK) return fail(is_eval ? "eval" : "knn");
        std::printf("accuracy: %.6f\n", accuracy);
        if (n_classes <= kCap) print_confusion(confusion, kCap, n_classes);
        const std::string& results = is_eval ? ev_results : knn_results;
        if (!results.empty()) {
            const char* exp_name = is_eval ? "eval" : "knn";
            if (evsloc_results_append(results.c_str(), exp_name, is_eval ? "model" : "knn", 0,
                                      is_eval ? ev_seed : knn_seed, accuracy, 0.0) != EVSLOC_OK)
                return fail("results");
        }
        return 0;
    }

    if (app.got_subcommand(cmd_sweep)) {
        std::vector<int> gammas;
        {
            std::string tok;
            for (char c : sw_gammas + ",") {
                if (c == ',') {
                    if (!tok.empty()) gammas.push_back(std::stoi(tok));
                    tok.clear();
                } else {
                    tok.push_back(c);
                }
            }
        }
        if (gammas.empty()) {
            std::fprintf(stderr, "evsloc: --gammas is empty\n");
            return 2;
        }
        if (evsloc_sweep_gamma((sw_stem + ".train.evsc").c_str(), (sw_stem + ".test.evsc").c_str(),
                               sw_kinds.c_str(), gammas.data(),
                               static_cast<uint32_t>(gammas.size()), &sw_params,
                               sw_results.c_str()) != EVSLOC_OK)
            return fail("sweep-gamma");
        std::printf("wrote %s\n", sw_results.c_str());
        return 0;
    }

    if (app.got_subcommand(cmd_compare)) {
        if (evsloc_compare((cp_stem + ".train.evsc").c_str(), (cp_stem + ".test.evsc").c_str(),
                           &cp_params, cp_results.c_str()) != EVSLOC_OK)
            return fail("compare");
        std::printf("wrote %s\n", cp_results.c_str());
        return 0;
    }

    return 2;
}
