#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/evs.hpp"
#include "core/features_io.hpp"
#include "core/mlp.hpp"

namespace evs {

struct ExtractRequest {
    FeatureKind kind = FeatureKind::kEvsAmp;
    int gamma = 0;
};

/// order_hint semantics for capture-level extraction.
constexpr int kOrderPerPacket = 0;     // classify every packet independently
constexpr int kOrderSessionVote = -1;  // classify all packets, majority vote, re-run fixed

/// One streaming pass over a capture serving several feature kinds at once.
/// The receiver chain runs once per packet; calibration windows are shared,
/// so the result is identical to extracting each kind separately.
std::vector<FeatureSet> extract_feature_sets(const std::string& capture_path,
                                             const std::vector<ExtractRequest>& requests,
                                             std::size_t window, int order_hint);

struct ConfusionMatrix {
    std::size_t num_classes = 0;
    std::vector<std::uint32_t> counts;  // row = true label, col = predicted

    std::uint32_t& at(std::size_t t, std::size_t p) { return counts[t * num_classes + p]; }
    std::uint32_t at(std::size_t t, std::size_t p) const { return counts[t * num_classes + p]; }
};

ConfusionMatrix confusion_matrix(const std::vector<std::uint16_t>& truth,
                                 const std::vector<std::uint16_t>& predicted);

/// One results row: mean/std accuracy of `runs` training runs of one
/// configuration. `run_accuracies` holds the individual runs behind the
/// aggregate (not part of the results table itself).
struct ResultRow {
    std::string experiment;
    std::string kind;
    int gamma = 0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double accuracy_std = 0.0;
    std::vector<double> run_accuracies;
};

/// Plain comma-separated table, header "experiment,kind,gamma,seed,accuracy,std".
void write_results(const std::string& path, const std::vector<ResultRow>& rows);
void append_results(const std::string& path, const std::vector<ResultRow>& rows);

/// Per-run log next to a results table, header
/// "experiment,kind,gamma,seed,run,accuracy"; lets the aggregate std be
/// recomputed offline.
void write_run_details(const std::string& path, const std::vector<ResultRow>& rows);

struct ExperimentParams {
    std::size_t window = 50;
    int order_hint = 0;
    int gamma_amp = 4;    // calibration used for evs-amp in `compare`
    int gamma_phase = 6;  // calibration used for evs-phase in `compare`
    std::size_t runs = 5;
    std::uint64_t seed = 1;
    TrainConfig train;
};

/// Trains `runs` classifiers on (train, test) features, reinitializing
/// weights only (per-run seeds derived from params.seed), and reports mean
/// and standard deviation of the test accuracy.
ResultRow run_repeated(const std::string& experiment, const FeatureSet& train_set,
                       const FeatureSet& test_set, int gamma, const ExperimentParams& params);

/// All four feature kinds through an identical classifier configuration.
std::vector<ResultRow> compare_features(const std::string& train_capture,
                                        const std::string& test_capture,
                                        const ExperimentParams& params);

/// Accuracy of the chosen kinds across a list of calibration exponents.
std::vector<ResultRow> sweep_gamma(const std::string& train_capture, const std::string& test_capture,
                                   const std::vector<FeatureKind>& kinds,
                                   const std::vector<int>& gammas, const ExperimentParams& params);

}  // namespace evs
