// Exercises the shared-library surface through the public C header only.

#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "evsloc/evsloc.h"

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

struct TempFiles {
    std::vector<std::string> paths;
    ~TempFiles() {
        for (const auto& p : paths) std::remove(p.c_str());
    }
    const char* add(const std::string& p) {
        paths.push_back(p);
        return paths.back().c_str();
    }
};

}  // namespace

TEST_CASE("version and error state") {
    CHECK(std::strlen(evsloc_version()) > 0);
    CHECK(std::string(evsloc_last_error()).empty());

    evsloc_capture_info info{};
    CHECK(evsloc_capture_stat("/definitely/not/here.evsc", &info) == EVSLOC_E_IO);
    CHECK(std::strlen(evsloc_last_error()) > 0);

    // next successful call clears the message
    evsloc_scene* scene = nullptr;
    REQUIRE(evsloc_scene_default(&scene) == EVSLOC_OK);
    CHECK(std::string(evsloc_last_error()).empty());
    evsloc_scene_free(scene);
}

TEST_CASE("null arguments are rejected, not crashed on") {
    CHECK(evsloc_scene_default(nullptr) == EVSLOC_E_INVALID);
    CHECK(evsloc_scene_load(nullptr, nullptr) == EVSLOC_E_INVALID);
    CHECK(evsloc_generate(nullptr, nullptr, nullptr) == EVSLOC_E_INVALID);
    CHECK(evsloc_extract(nullptr, nullptr, nullptr) == EVSLOC_E_INVALID);
    CHECK(evsloc_train(nullptr, nullptr, nullptr, nullptr) == EVSLOC_E_INVALID);
    CHECK(evsloc_eval(nullptr, nullptr, nullptr, nullptr, 0, nullptr) == EVSLOC_E_INVALID);
    evsloc_scene_free(nullptr);  // no-op
}

TEST_CASE("scene round trip through the C surface") {
    TempFiles tmp;
    evsloc_scene* scene = nullptr;
    REQUIRE(evsloc_scene_default(&scene) == EVSLOC_OK);

    uint32_t labels = 0;
    CHECK(evsloc_scene_num_labels(scene, &labels) == EVSLOC_OK);
    CHECK(labels == 26);

    const char* path = tmp.add(temp_path("evs_capi_scene.json"));
    CHECK(evsloc_scene_save(scene, path) == EVSLOC_OK);
    evsloc_scene_free(scene);

    evsloc_scene* loaded = nullptr;
    REQUIRE(evsloc_scene_load(path, &loaded) == EVSLOC_OK);
    CHECK(evsloc_scene_num_labels(loaded, &labels) == EVSLOC_OK);
    CHECK(labels == 26);
    evsloc_scene_free(loaded);
}

TEST_CASE("full pipeline through the C surface") {
    TempFiles tmp;
    const std::string stem = temp_path("evs_capi_ds");
    tmp.add(stem + ".train.evsc");
    tmp.add(stem + ".test.evsc");

    evsloc_scene* scene = nullptr;
    REQUIRE(evsloc_scene_default(&scene) == EVSLOC_OK);

    evsloc_gen_params gp{};
    evsloc_gen_params_init(&gp);
    gp.train_per_label = 8;
    gp.test_per_label = 2;
    gp.snr_db = 25.0;
    gp.cfo_hz = 200.0;
    gp.order = 4;
    gp.seed = 99;
    REQUIRE(evsloc_generate(scene, &gp, stem.c_str()) == EVSLOC_OK);
    evsloc_scene_free(scene);

    evsloc_capture_info info{};
    REQUIRE(evsloc_capture_stat((stem + ".train.evsc").c_str(), &info) == EVSLOC_OK);
    CHECK(info.k == 52);
    CHECK(info.n_ltf == 2);
    CHECK(info.n_df == 50);
    CHECK(info.packet_count == 26 * 8);
    CHECK((info.flags & 1) == 1);

    // extract csi-amp features for train and test
    evsloc_extract_params ep{};
    evsloc_extract_params_init(&ep);
    ep.kind = "csi-amp";
    const char* train_csv = tmp.add(temp_path("evs_capi_train.csv"));
    const char* test_csv = tmp.add(temp_path("evs_capi_test.csv"));
    REQUIRE(evsloc_extract((stem + ".train.evsc").c_str(), &ep, train_csv) == EVSLOC_OK);
    REQUIRE(evsloc_extract((stem + ".test.evsc").c_str(), &ep, test_csv) == EVSLOC_OK);

    ep.kind = "no-such-kind";
    CHECK(evsloc_extract((stem + ".train.evsc").c_str(), &ep, train_csv) == EVSLOC_E_INVALID);

    // train a small model
    evsloc_train_params tp{};
    evsloc_train_params_init(&tp);
    tp.max_epochs = 4;
    tp.batch_size = 16;
    tp.hidden1 = 16;
    tp.hidden2 = 0;
    const char* model = tmp.add(temp_path("evs_capi_model.json"));
    const char* history = tmp.add(temp_path("evs_capi_history.csv"));
    REQUIRE(evsloc_train(train_csv, &tp, model, history) == EVSLOC_OK);
    CHECK(std::filesystem::exists(model));
    CHECK(std::filesystem::exists(history));

    // evaluate
    double acc = -1.0;
    std::vector<uint32_t> confusion(32 * 32, 0);
    uint32_t n_classes = 0;
    REQUIRE(evsloc_eval(model, test_csv, &acc, confusion.data(), 32, &n_classes) == EVSLOC_OK);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(n_classes == 26);
    uint64_t total = 0;
    for (uint32_t c : confusion) total += c;
    CHECK(total == 26 * 2);

    // knn on the same features
    double knn_acc = -1.0;
    REQUIRE(evsloc_knn(train_csv, test_csv, 3, &knn_acc, nullptr, 0, nullptr) == EVSLOC_OK);
    CHECK(knn_acc >= 0.0);
    CHECK(knn_acc <= 1.0);

    // results appending
    const char* results = tmp.add(temp_path("evs_capi_results.csv"));
    std::remove(results);
    REQUIRE(evsloc_results_append(results, "eval", "csi-amp", 0, 1, acc, 0.0) == EVSLOC_OK);
    REQUIRE(evsloc_results_append(results, "knn", "csi-amp", 0, 1, knn_acc, 0.0) == EVSLOC_OK);
    CHECK(std::filesystem::exists(results));
}

TEST_CASE("experiments through the C surface") {
    TempFiles tmp;
    const std::string stem = temp_path("evs_capi_exp");
    tmp.add(stem + ".train.evsc");
    tmp.add(stem + ".test.evsc");

    evsloc_scene* scene = nullptr;
    REQUIRE(evsloc_scene_default(&scene) == EVSLOC_OK);
    evsloc_gen_params gp{};
    evsloc_gen_params_init(&gp);
    gp.train_per_label = 6;
    gp.test_per_label = 1;
    gp.order = 4;
    gp.seed = 7;
    REQUIRE(evsloc_generate(scene, &gp, stem.c_str()) == EVSLOC_OK);
    evsloc_scene_free(scene);

    evsloc_experiment_params xp{};
    evsloc_experiment_params_init(&xp);
    xp.runs = 1;
    xp.train.max_epochs = 2;
    xp.train.batch_size = 16;
    xp.train.hidden1 = 8;
    xp.train.hidden2 = 0;

    const char* cmp = tmp.add(temp_path("evs_capi_cmp.csv"));
    REQUIRE(evsloc_compare((stem + ".train.evsc").c_str(), (stem + ".test.evsc").c_str(), &xp,
                           cmp) == EVSLOC_OK);
    CHECK(std::filesystem::exists(cmp));

    const int gammas[2] = {0, 2};
    const char* sweep = tmp.add(temp_path("evs_capi_sweep.csv"));
    REQUIRE(evsloc_sweep_gamma((stem + ".train.evsc").c_str(), (stem + ".test.evsc").c_str(),
                               "evs-amp", gammas, 2, &xp, sweep) == EVSLOC_OK);
    CHECK(std::filesystem::exists(sweep));

    CHECK(evsloc_sweep_gamma((stem + ".train.evsc").c_str(), (stem + ".test.evsc").c_str(),
                             "csi-amp", gammas, 2, &xp, sweep) == EVSLOC_E_INVALID);
}
