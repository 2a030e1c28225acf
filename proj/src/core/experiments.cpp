#include "core/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/capture.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace evs {

namespace {

/// Majority vote over per-packet modulation classifications; ties toward
/// the smaller order.
int session_order_vote(const std::string& capture_path, const SubcarrierGrid& grid,
                       const FrameLayout& layout) {
    std::map<int, std::size_t> votes;
    CaptureReader reader(capture_path);
    Packet pkt;
    std::size_t index = 0;
    while (reader.next(pkt)) {
        try {
            pkt.validate(grid, layout);
            const CsiVector csi = estimate_csi(pkt.ltf_rx, layout.ltf_ref);
            const RfoEstimate rfo = estimate_rfo(pkt.df_rx, csi, grid, layout);
            const EqualizedSymbols eq = equalize(pkt.df_rx, csi, rfo, grid);
            ++votes[classify_modulation(eq, grid)];
        } catch (const Error& e) {
            throw Error("packet " + std::to_string(index) + ": " + e.what());
        }
        ++index;
    }
    int best = 0;
    std::size_t count = 0;
    for (const auto& [order, c] : votes) {  // map iterates ascending: ties keep the smaller
        if (c > count) {
            count = c;
            best = order;
        }
    }
    if (best == 0) throw InvalidInput("session vote: capture has no packets");
    return best;
}

}  // namespace

std::vector<FeatureSet> extract_feature_sets(const std::string& capture_path,
                                             const std::vector<ExtractRequest>& requests,
                                             std::size_t window, int order_hint) {
    if (requests.empty()) throw InvalidInput("extract: no feature kinds requested");
    if (window < 1) throw InvalidInput("extract: window must be >= 1");

    const SubcarrierGrid grid = default_grid();
    const FrameLayout base = default_layout();

    CaptureReader reader(capture_path);
    FrameLayout layout = base;
    layout.n_ltf = reader.header().n_ltf;
    layout.n_df = reader.header().n_df;
    if (reader.header().k != grid.num_subcarriers())
        throw InvalidInput("extract: capture has K=" + std::to_string(reader.header().k) +
                           ", expected " + std::to_string(grid.num_subcarriers()));

    bool any_evs = false;
    for (const auto& r : requests)
        any_evs |= (r.kind == FeatureKind::kEvsAmp || r.kind == FeatureKind::kEvsPhase);

    if (order_hint == kOrderSessionVote && any_evs)
        order_hint = session_order_vote(capture_path, grid, layout);

    CalibrationWindows windows(window);
    std::vector<FeatureSet> sets(requests.size());

    Packet pkt;
    std::size_t packet_index = 0;
    while (reader.next(pkt)) {
        const std::deque<RawEvsVector>* label_window = nullptr;
        CsiVector csi;
        try {
            pkt.validate(grid, layout);
            csi = estimate_csi(pkt.ltf_rx, layout.ltf_ref);
            if (any_evs) {
                const RfoEstimate rfo = estimate_rfo(pkt.df_rx, csi, grid, layout);
                const EqualizedSymbols eq = equalize(pkt.df_rx, csi, rfo, grid);
                const int order = order_hint > 0 ? order_hint : classify_modulation(eq, grid);
                const CMat x_hat = hard_decide(eq, order, grid, layout);
                label_window = &windows.push(pkt.label, average_evs(raw_evs(eq, x_hat)));
            }
        } catch (const Error& e) {
            throw Error("packet " + std::to_string(packet_index) + ": " + e.what());
        }
        ++packet_index;

        for (std::size_t i = 0; i < requests.size(); ++i) {
            FeatureVector fv;
            fv.kind = requests[i].kind;
            fv.label = pkt.label;
            switch (requests[i].kind) {
                case FeatureKind::kCsiAmp:
                    fv.values = csi.amplitude();
                    break;
                case FeatureKind::kCsiPhase:
                    fv.values = csi.phase();
                    break;
                default: {
                    const EvsVector cal =
                        calibrate(label_window->back(), *label_window, requests[i].gamma);
                    fv.values = requests[i].kind == FeatureKind::kEvsAmp ? cal.amplitude()
                                                                         : cal.phase();
                }
            }
            sets[i].append(fv);
        }
    }
    return sets;
}

ConfusionMatrix confusion_matrix(const std::vector<std::uint16_t>& truth,
                                 const std::vector<std::uint16_t>& predicted) {
    if (truth.size() != predicted.size()) throw InvalidInput("confusion: size mismatch");
    std::uint16_t mx = 0;
    for (std::uint16_t t : truth) mx = std::max(mx, t);
    for (std::uint16_t p : predicted) mx = std::max(mx, p);
    ConfusionMatrix cm;
    cm.num_classes = std::size_t(mx) + 1;
    cm.counts.assign(cm.num_classes * cm.num_classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) ++cm.at(truth[i], predicted[i]);
    return cm;
}

namespace {

void write_rows(std::FILE* f, const std::vector<ResultRow>& rows, bool header) {
    if (header) std::fprintf(f, "experiment,kind,gamma,seed,accuracy,std\n");
    for (const auto& r : rows) {
        std::fprintf(f, "%s,%s,%d,%llu,%.9g,%.9g\n", r.experiment.c_str(), r.kind.c_str(), r.gamma,
                     static_cast<unsigned long long>(r.seed), r.accuracy, r.accuracy_std);
    }
}

}  // namespace

void write_results(const std::string& path, const std::vector<ResultRow>& rows) {
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + tmp);
    write_rows(f, rows, true);
    if (std::fclose(f) != 0) throw IoError("close failed on " + tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

void write_run_details(const std::string& path, const std::vector<ResultRow>& rows) {
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + tmp);
    std::fprintf(f, "experiment,kind,gamma,seed,run,accuracy\n");
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.run_accuracies.size(); ++i) {
            std::fprintf(f, "%s,%s,%d,%llu,%zu,%.9g\n", r.experiment.c_str(), r.kind.c_str(),
                         r.gamma, static_cast<unsigned long long>(r.seed), i,
                         r.run_accuracies[i]);
        }
    }
    if (std::fclose(f) != 0) throw IoError("close failed on " + tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

void append_results(const std::string& path, const std::vector<ResultRow>& rows) {
    // read-modify-write so the final rename stays atomic
    std::string existing;
    {
        std::ifstream in(path, std::ios::binary);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            existing = ss.str();
        }
    }
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + tmp);
    if (existing.empty()) {
        write_rows(f, rows, true);
    } else {
        std::fwrite(existing.data(), 1, existing.size(), f);
        write_rows(f, rows, false);
    }
    if (std::fclose(f) != 0) throw IoError("close failed on " + tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

ResultRow run_repeated(const std::string& experiment, const FeatureSet& train_set,
                       const FeatureSet& test_set, int gamma, const ExperimentParams& params) {
    if (params.runs < 1) throw InvalidInput("experiment: runs must be >= 1");
    std::vector<double> accs;
    accs.reserve(params.runs);
    for (std::size_t run = 0; run < params.runs; ++run) {
        TrainConfig tc = params.train;
        tc.seed = RngStream::derive(params.seed,
                                    {0x72756eULL, static_cast<std::uint64_t>(train_set.kind),
                                     static_cast<std::uint64_t>(gamma + 1), run})
                      .next_u64();
        const TrainResult tr = train_mlp(train_set, tc);
        accs.push_back(mlp_predict(tr.model, test_set).accuracy);
    }
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= static_cast<double>(accs.size());
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    var /= static_cast<double>(accs.size());

    ResultRow row;
    row.experiment = experiment;
    row.kind = feature_kind_name(train_set.kind);
    row.gamma = gamma;
    row.seed = params.seed;
    row.accuracy = mean;
    row.accuracy_std = std::sqrt(var);
    row.run_accuracies = std::move(accs);
    return row;
}

std::vector<ResultRow> compare_features(const std::string& train_capture,
                                        const std::string& test_capture,
                                        const ExperimentParams& params) {
    const std::vector<ExtractRequest> reqs = {
        {FeatureKind::kCsiAmp, 0},
        {FeatureKind::kCsiPhase, 0},
        {FeatureKind::kEvsAmp, params.gamma_amp},
        {FeatureKind::kEvsPhase, params.gamma_phase},
    };
    const auto train_sets = extract_feature_sets(train_capture, reqs, params.window, params.order_hint);
    const auto test_sets = extract_feature_sets(test_capture, reqs, params.window, params.order_hint);

    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        rows.push_back(run_repeated("compare", train_sets[i], test_sets[i], reqs[i].gamma, params));
    }
    return rows;
}

std::vector<ResultRow> sweep_gamma(const std::string& train_capture, const std::string& test_capture,
                                   const std::vector<FeatureKind>& kinds,
                                   const std::vector<int>& gammas, const ExperimentParams& params) {
    if (kinds.empty() || gammas.empty()) throw InvalidInput("sweep: kinds and gammas must be nonempty");
    for (FeatureKind k : kinds) {
        if (k != FeatureKind::kEvsAmp && k != FeatureKind::kEvsPhase)
            throw InvalidInput("sweep: gamma applies to EVS kinds only");
    }

    std::vector<ExtractRequest> reqs;
    for (FeatureKind k : kinds)
        for (int g : gammas) reqs.push_back({k, g});

    const auto train_sets = extract_feature_sets(train_capture, reqs, params.window, params.order_hint);
    const auto test_sets = extract_feature_sets(test_capture, reqs, params.window, params.order_hint);

    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        rows.push_back(
            run_repeated("sweep-gamma", train_sets[i], test_sets[i], reqs[i].gamma, params));
    }
    return rows;
}

}  // namespace evs
