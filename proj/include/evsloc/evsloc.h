/*
 * evsloc - error-vector-spectrum feature extraction and device-free
 * localization experiments for Wi-Fi-style OFDM captures.
 *
 * C interface to the shared library. All functions return EVSLOC_OK on
 * success or an error code; evsloc_last_error() describes the most recent
 * failure on the calling thread. Handles are opaque and must be released
 * with their matching *_free function.
 */

#ifndef EVSLOC_H
#define EVSLOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EVSLOC_API __declspec(dllexport)
#else
#define EVSLOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    EVSLOC_OK = 0,
    EVSLOC_E_INVALID = 1, /* bad argument or violated precondition */
    EVSLOC_E_IO = 2,      /* filesystem failure */
    EVSLOC_E_PARSE = 3,   /* malformed file contents */
    EVSLOC_E_RUNTIME = 4  /* anything else */
};

EVSLOC_API const char* evsloc_version(void);

/* Message for the last failure on this thread; empty string if none. The
 * pointer stays valid until the next library call on the same thread. */
EVSLOC_API const char* evsloc_last_error(void);

/* ---- scenes ---------------------------------------------------------- */

typedef struct evsloc_scene evsloc_scene;

EVSLOC_API int evsloc_scene_default(evsloc_scene** out);
EVSLOC_API int evsloc_scene_load(const char* path, evsloc_scene** out);
EVSLOC_API int evsloc_scene_save(const evsloc_scene* scene, const char* path);
EVSLOC_API int evsloc_scene_num_labels(const evsloc_scene* scene, uint32_t* out);
EVSLOC_API void evsloc_scene_free(evsloc_scene* scene);

/* ---- capture generation ---------------------------------------------- */

typedef struct evsloc_gen_params {
    uint32_t train_per_label; /* default 400 */
    uint32_t test_per_label;  /* default 100 */
    double snr_db;            /* +inf disables noise; default 20 */
    double cfo_hz;            /* default 0 */
    int order;                /* 2, 4, 16 or 64; default 4 */
    uint64_t seed;            /* default 1 */
} evsloc_gen_params;

EVSLOC_API void evsloc_gen_params_init(evsloc_gen_params* p);

/* Writes <out_stem>.train.evsc and <out_stem>.test.evsc. */
EVSLOC_API int evsloc_generate(const evsloc_scene* scene, const evsloc_gen_params* params,
                               const char* out_stem);

typedef struct evsloc_capture_info {
    uint16_t version;
    uint16_t k;
    uint16_t n_ltf;
    uint16_t n_df;
    uint32_t packet_count;
    uint16_t flags; /* bit 0: per-packet metadata present */
} evsloc_capture_info;

EVSLOC_API int evsloc_capture_stat(const char* path, evsloc_capture_info* out);

/* ---- feature extraction ---------------------------------------------- */

typedef struct evsloc_extract_params {
    const char* kind; /* "csi-amp" | "csi-phase" | "evs-amp" | "evs-phase" */
    int gamma;        /* calibration exponent, >= 0; default 0 */
    uint32_t window;  /* per-label sliding window length; default 50 */
    int order_hint;   /* 2|4|16|64 fixed, 0 = classify per packet, -1 = session vote */
} evsloc_extract_params;

EVSLOC_API void evsloc_extract_params_init(evsloc_extract_params* p);

EVSLOC_API int evsloc_extract(const char* capture_path, const evsloc_extract_params* params,
                              const char* features_out);

/* ---- classifier ------------------------------------------------------- */

typedef struct evsloc_train_params {
    double learning_rate; /* default 1e-3 */
    double momentum;      /* default 0.9 */
    double val_fraction;  /* default 0.1 */
    uint32_t batch_size;  /* default 64 */
    uint32_t max_epochs;  /* default 100 */
    uint32_t patience;    /* default 10 */
    uint32_t hidden1;     /* default 128; 0 removes the layer */
    uint32_t hidden2;     /* default 64; 0 removes the layer */
    uint64_t seed;        /* default 1 */
} evsloc_train_params;

EVSLOC_API void evsloc_train_params_init(evsloc_train_params* p);

/* Trains on a feature file, stores the model; when history_out is non-NULL
 * also writes a per-epoch loss/accuracy table. */
EVSLOC_API int evsloc_train(const char* features_path, const evsloc_train_params* params,
                            const char* model_out, const char* history_out);

/* Evaluates a stored model. confusion (optional) receives row-major
 * true x predicted counts for up to num_classes_cap classes;
 * *num_classes_out reports the actual class count. */
EVSLOC_API int evsloc_eval(const char* model_path, const char* features_path, double* accuracy,
                           uint32_t* confusion, uint32_t num_classes_cap,
                           uint32_t* num_classes_out);

EVSLOC_API int evsloc_knn(const char* train_features, const char* test_features, uint32_t k,
                          double* accuracy, uint32_t* confusion, uint32_t num_classes_cap,
                          uint32_t* num_classes_out);

/* ---- experiments ------------------------------------------------------ */

typedef struct evsloc_experiment_params {
    uint32_t window;  /* default 50 */
    int order_hint;   /* 2|4|16|64 fixed, 0 = per packet, -1 = session vote */
    int gamma_amp;    /* evs-amp calibration in compare; default 4 */
    int gamma_phase;  /* evs-phase calibration in compare; default 6 */
    uint32_t runs;    /* training repetitions per row; default 5 */
    uint64_t seed;    /* default 1 */
    evsloc_train_params train;
} evsloc_experiment_params;

EVSLOC_API void evsloc_experiment_params_init(evsloc_experiment_params* p);

/* Runs all four feature kinds through an identical classifier and writes
 * the results table plus a <results_out>.runs.csv per-run log. */
EVSLOC_API int evsloc_compare(const char* train_capture, const char* test_capture,
                              const evsloc_experiment_params* params, const char* results_out);

/* kinds_csv example: "evs-amp,evs-phase". Also writes <results_out>.runs.csv. */
EVSLOC_API int evsloc_sweep_gamma(const char* train_capture, const char* test_capture,
                                  const char* kinds_csv, const int* gammas, uint32_t n_gammas,
                                  const evsloc_experiment_params* params, const char* results_out);

/* Appends one row to a results table (creating it with a header). */
EVSLOC_API int evsloc_results_append(const char* path, const char* experiment, const char* kind,
                                     int gamma, uint64_t seed, double accuracy, double std_dev);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EVSLOC_H */
