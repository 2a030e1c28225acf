// Acceptance suite: one line per criterion, nonzero exit on any failure.
//
//   acceptance [--only N]... [--workdir PATH]
//
// Heavy fixtures (the desk-scale dataset) are cached under the workdir;
// regeneration is byte-identical, so caching does not change any outcome.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "core/baseband.hpp"
#include "core/constellation.hpp"
#include "core/dataset.hpp"
#include "core/evs.hpp"
#include "core/experiments.hpp"
#include "core/mlp.hpp"
#include "core/rng.hpp"

using namespace evs;

namespace {

const SubcarrierGrid& grid() {
    static const SubcarrierGrid g = default_grid();
    return g;
}
const FrameLayout& layout() {
    static const FrameLayout l = default_layout();
    return l;
}
const Scene& scene() {
    static const Scene s = default_scene();
    return s;
}

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string g_workdir = "acceptance-work";

// ---- desk-scale experiment fixture (criteria 7, 8, 9) -------------------

constexpr std::uint64_t kDeskSeed = 20250801;
constexpr double kDeskSnrDb = 20.0;
constexpr double kDeskCfoHz = 310.0;
constexpr int kDeskOrder = 16;

GenParams desk_params() {
    GenParams gp;
    gp.train_per_label = 400;
    gp.test_per_label = 100;
    gp.snr_db = kDeskSnrDb;
    gp.cfo_hz = kDeskCfoHz;
    gp.order = kDeskOrder;
    gp.seed = kDeskSeed;
    return gp;
}

ExperimentParams desk_experiment(std::uint64_t seed) {
    ExperimentParams p;
    p.window = 50;
    p.order_hint = 0;
    p.gamma_amp = 4;
    p.gamma_phase = 6;
    p.runs = 5;
    p.seed = seed;
    p.train.max_epochs = 60;
    p.train.patience = 10;
    p.train.batch_size = 64;
    p.train.learning_rate = 1e-3;
    p.train.momentum = 0.9;
    p.train.hidden = {128, 64};
    p.train.val_fraction = 0.1;
    return p;
}

/// Generates the desk dataset under the given stem unless both captures are
/// already present (generation is deterministic, so reuse == regeneration).
void ensure_desk_dataset(const std::string& stem) {
    const std::string train = stem + ".train.evsc";
    const std::string test = stem + ".test.evsc";
    if (std::filesystem::exists(train) && std::filesystem::exists(test)) return;
    std::printf("  [fixture] generating desk dataset %s (26 labels x 400/100)\n", stem.c_str());
    std::fflush(stdout);
    generate_dataset(scene(), grid(), layout(), desk_params(), stem);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::map<std::string, ResultRow> rows_by_kind(const std::vector<ResultRow>& rows) {
    std::map<std::string, ResultRow> out;
    for (const auto& r : rows) out[r.kind] = r;
    return out;
}

// ---- criteria ------------------------------------------------------------

bool criterion1() {
    const double t0 = now_s();
    RngStream pick(1001);
    double worst_eq = 0.0, worst_evs = 0.0;
    CalibrationWindows windows(50);

    std::vector<MultipathProfile> profiles(scene().num_labels());
    for (std::size_t l = 0; l < profiles.size(); ++l)
        profiles[l] = build_profile(scene(), static_cast<int>(l), grid());

    static const int kOrders[4] = {2, 4, 16, 64};
    for (int i = 0; i < 1000; ++i) {
        const auto label = static_cast<std::uint16_t>(i % 26);
        GenParams gp;
        gp.snr_db = std::numeric_limits<double>::infinity();
        gp.cfo_hz = pick.uniform(-2500.0, 2500.0);  // trajectory start drawn inside
        gp.order = kOrders[i % 4];
        gp.seed = 7000 + static_cast<std::uint64_t>(i);
        const Packet pkt = simulate_packet(grid(), layout(), profiles[label], gp, false, label, 0);

        const CsiVector csi = estimate_csi(pkt.ltf_rx, layout().ltf_ref);
        const RfoEstimate rfo = estimate_rfo(pkt.df_rx, csi, grid(), layout());
        const EqualizedSymbols eq = equalize(pkt.df_rx, csi, rfo, grid());
        for (std::size_t j = 0; j < eq.x_bar.v.size(); ++j)
            worst_eq = std::max(worst_eq, std::abs(eq.x_bar.v[j] - pkt.meta->tx_df.v[j]));

        const int order = classify_modulation(eq, grid());
        const CMat x_hat = hard_decide(eq, order, grid(), layout());
        const auto& window = windows.push(label, average_evs(raw_evs(eq, x_hat)));
        const EvsVector cal = calibrate(window.back(), window, 0);
        for (double a : cal.amplitude()) worst_evs = std::max(worst_evs, a);
    }
    const double elapsed = now_s() - t0;
    const bool ok = worst_eq <= 1e-9 && worst_evs <= 1e-9 && elapsed < 10.0;
    std::printf("criterion 1: %s zero-noise round trip (1000 packets, 26 labels): max "
                "|x_bar - x| = %.2e, max EVS amplitude = %.2e, %.1f s\n",
                ok ? "PASS" : "FAIL", worst_eq, worst_evs, elapsed);
    return ok;
}

bool criterion2() {
    int pass = 0;
    const int pairs = 100;
    RngStream pick(9100);
    for (int i = 0; i < pairs; ++i) {
        const auto label = static_cast<std::uint16_t>(i % 26);
        const MultipathProfile prof = build_profile(scene(), label, grid());

        // identical payload and channel; only the offset trajectory differs
        RngStream payload_rng = RngStream::derive(9200, {static_cast<std::uint64_t>(i)});
        const CMat tx = random_df_payload(layout(), grid(), 16, payload_rng);
        RfoModel rfo_a, rfo_b;
        rfo_a.cfo_hz = pick.uniform(-2000.0, 2000.0);
        rfo_b.cfo_hz = pick.uniform(-2000.0, 2000.0);
        const double phi0_a = pick.uniform(0.0, 2.0 * std::numbers::pi);
        const double phi0_b = pick.uniform(0.0, 2.0 * std::numbers::pi);
        const double inf = std::numeric_limits<double>::infinity();
        RngStream na(1), nb(1);  // unused at infinite SNR
        const Packet pa = apply_channel(grid(), layout(), prof, rfo_a, phi0_a, tx, inf, label, na);
        const Packet pb = apply_channel(grid(), layout(), prof, rfo_b, phi0_b, tx, inf, label, nb);

        CalibrationWindows wa(50), wb(50);
        const FeatureConfig evs_phase{FeatureKind::kEvsPhase, 0, 0};
        const auto fa = extract_features(pa, grid(), layout(), evs_phase, &wa);
        const auto fb = extract_features(pb, grid(), layout(), evs_phase, &wb);
        double rms = 0.0;
        for (std::size_t k = 0; k < fa.values.size(); ++k) {
            const double d = principal_phase(fa.values[k] - fb.values[k]);
            rms += d * d;
        }
        rms = std::sqrt(rms / static_cast<double>(fa.values.size()));

        const FeatureConfig csi_phase{FeatureKind::kCsiPhase, 0, 0};
        const auto ca = extract_features(pa, grid(), layout(), csi_phase, nullptr);
        const auto cb = extract_features(pb, grid(), layout(), csi_phase, nullptr);
        const double offset_a = 0.5 * (pa.meta->rfo_trajectory[0] + pa.meta->rfo_trajectory[1]);
        const double offset_b = 0.5 * (pb.meta->rfo_trajectory[0] + pb.meta->rfo_trajectory[1]);
        const double want = principal_phase(offset_b - offset_a);
        double worst_csi = 0.0;
        for (std::size_t k = 0; k < ca.values.size(); ++k) {
            const double d = principal_phase(ca.values[k] - cb.values[k] - want);
            worst_csi = std::max(worst_csi, std::abs(d));
        }

        if (rms < 1e-6 && worst_csi <= 1e-6) ++pass;
    }
    const bool ok = pass == pairs;
    std::printf("criterion 2: %s RFO invariance: %d/%d pairs (evs-phase RMS < 1e-6 rad, "
                "csi-phase shift matches the injected offset)\n",
                ok ? "PASS" : "FAIL", pass, pairs);
    return ok;
}

bool criterion3() {
    // noise-free, all orders, full receive chain
    int correct = 0;
    const int per_order = 400;
    std::vector<MultipathProfile> profiles(scene().num_labels());
    for (std::size_t l = 0; l < profiles.size(); ++l)
        profiles[l] = build_profile(scene(), static_cast<int>(l), grid());
    for (int order : {2, 4, 16, 64}) {
        for (int i = 0; i < per_order; ++i) {
            const auto label = static_cast<std::uint16_t>(i % 26);
            GenParams gp;
            gp.snr_db = std::numeric_limits<double>::infinity();
            gp.cfo_hz = -800.0 + 4.0 * i;
            gp.order = order;
            gp.seed = 11000 + static_cast<std::uint64_t>(i);
            const Packet pkt =
                simulate_packet(grid(), layout(), profiles[label], gp, false, label, 1);
            const CsiVector csi = estimate_csi(pkt.ltf_rx, layout().ltf_ref);
            const RfoEstimate rfo = estimate_rfo(pkt.df_rx, csi, grid(), layout());
            const EqualizedSymbols eq = equalize(pkt.df_rx, csi, rfo, grid());
            if (classify_modulation(eq, grid()) == order) ++correct;
        }
    }
    const bool noise_free_ok = correct == 4 * per_order;

    // QPSK at 25 dB: Monte-Carlo over equalized frames with that SNR
    RngStream rng(12000);
    const Constellation qpsk = make_constellation(4);
    const double sigma = std::sqrt(std::pow(10.0, -25.0 / 10.0) / 2.0);
    int hits = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        EqualizedSymbols eq;
        eq.x_bar = CMat(grid().num_subcarriers(), layout().n_df);
        for (std::size_t k = 0; k < eq.x_bar.rows; ++k) {
            const int idx = grid().occupied[k];
            const bool pilot = grid().is_pilot(idx);
            for (std::size_t n = 0; n < eq.x_bar.cols; ++n) {
                cx v = pilot ? cx(1.0, 0.0) : qpsk.points[rng.uniform_int(4)];
                v += cx(rng.gaussian() * sigma, rng.gaussian() * sigma);
                eq.x_bar.at(k, n) = v;
            }
        }
        if (classify_modulation(eq, grid()) == 4) ++hits;
    }
    const double rate = static_cast<double>(hits) / trials;
    const bool ok = noise_free_ok && rate >= 0.99;
    std::printf("criterion 3: %s modulation classification: noise-free %d/%d, QPSK@25dB "
                "%.1f%% (need >= 99%%)\n",
                ok ? "PASS" : "FAIL", correct, 4 * per_order, 100.0 * rate);
    return ok;
}

bool criterion4() {
    RngStream rng(13000);
    std::size_t mismatches = 0;
    for (int order : {2, 4, 16, 64}) {
        const Constellation c = make_constellation(order);
        // 10^4 random symbols per order, decided through the pipeline op
        const std::size_t cells = 10000;
        const std::size_t cols = cells / grid().num_subcarriers() + 1;
        EqualizedSymbols eq;
        eq.x_bar = CMat(grid().num_subcarriers(), cols);
        for (cx& z : eq.x_bar.v) z = cx(rng.uniform(-1.8, 1.8), rng.uniform(-1.8, 1.8));
        const CMat d = hard_decide(eq, order, grid(), layout());
        std::size_t seen = 0;
        for (std::size_t k = 0; k < d.rows && seen < cells; ++k) {
            if (grid().is_pilot(grid().occupied[k])) continue;
            for (std::size_t n = 0; n < d.cols && seen < cells; ++n, ++seen) {
                // oracle: exhaustive scan, ties toward the smaller index
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < c.points.size(); ++i) {
                    const double dist = std::norm(eq.x_bar.at(k, n) - c.points[i]);
                    if (dist < best_d) {
                        best_d = dist;
                        best = i;
                    }
                }
                if (d.at(k, n) != c.points[best]) ++mismatches;
            }
        }
    }
    const bool ok = mismatches == 0;
    std::printf("criterion 4: %s hard decision vs brute-force oracle: %zu mismatches over 4x10^4 "
                "symbols\n",
                ok ? "PASS" : "FAIL", mismatches);
    return ok;
}

bool criterion5() {
    RngStream rng(14000);
    const std::size_t k = grid().num_subcarriers();
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        std::deque<RawEvsVector> window;
        const std::size_t t_len = 1 + rng.uniform_int(50);
        for (std::size_t t = 0; t < t_len; ++t) {
            RawEvsVector v;
            v.eps_bar.resize(k);
            for (cx& z : v.eps_bar) z = cx(rng.gaussian(), rng.gaussian());
            window.push_back(std::move(v));
        }
        const RawEvsVector& cur = window.back();
        std::vector<cx> mean(k, cx(0.0, 0.0));
        for (const auto& w : window)
            for (std::size_t i = 0; i < k; ++i) mean[i] += w.eps_bar[i];
        for (cx& z : mean) z /= static_cast<double>(window.size());

        const EvsVector g0 = calibrate(cur, window, 0);
        const EvsVector g1 = calibrate(cur, window, 1);
        const EvsVector g12 = calibrate(cur, window, 12);
        for (std::size_t i = 0; i < k; ++i) {
            // gamma 0: identity
            if (g0.eps[i] != cur.eps_bar[i]) ok = false;
            // gamma 1: midpoint, 1e-12 relative
            const cx mid = 0.5 * cur.eps_bar[i] + 0.5 * mean[i];
            if (std::abs(g1.eps[i] - mid) > 1e-12 * std::max(1.0, std::abs(mid))) ok = false;
            // gamma 12: within 2^-12 of the window mean
            const double bound = std::abs(cur.eps_bar[i] - mean[i]) / 4096.0 +
                                 1e-12 * std::max(1.0, std::abs(mean[i]));
            if (std::abs(g12.eps[i] - mean[i]) > bound) ok = false;
        }
    }
    std::printf("criterion 5: %s calibration algebra (gamma 0 identity, gamma 1 midpoint, "
                "gamma 12 -> window mean, per subcarrier)\n",
                ok ? "PASS" : "FAIL");
    return ok;
}

bool criterion6() {
    RngStream rng(15000);
    std::size_t checked = 0, passed = 0;
    for (int model_i = 0; model_i < 10; ++model_i) {
        MlpModel m;
        m.dims = {6, 9, 7, 5};
        m.feature_kind = "evs-amp";
        m.feat_mean.assign(6, 0.0);
        m.feat_std.assign(6, 1.0);
        RngStream init(16000 + model_i);
        for (std::size_t l = 0; l + 1 < m.dims.size(); ++l) {
            m.weights.emplace_back(m.dims[l] * m.dims[l + 1]);
            m.biases.emplace_back(m.dims[l + 1]);
            for (double& w : m.weights.back()) w = init.gaussian() * 0.6;
            for (double& b : m.biases.back()) b = init.gaussian() * 0.2;
        }
        std::vector<double> x(6);
        for (double& v : x) v = rng.gaussian();
        const std::size_t label = rng.uniform_int(5);
        const MlpGradients g = mlp_backward(m, x, label);

        for (int s = 0; s < 100; ++s) {
            const std::size_t layer = rng.uniform_int(m.weights.size());
            const bool bias = rng.uniform() < 0.25;
            auto& params = bias ? m.biases[layer] : m.weights[layer];
            const auto& grads = bias ? g.d_biases[layer] : g.d_weights[layer];
            const std::size_t idx = rng.uniform_int(params.size());
            const double h = 1e-5;
            const double orig = params[idx];
            params[idx] = orig + h;
            const double up = cross_entropy(mlp_forward(m, x), label);
            params[idx] = orig - h;
            const double down = cross_entropy(mlp_forward(m, x), label);
            params[idx] = orig;
            const double numeric = (up - down) / (2.0 * h);
            const double rel = std::abs(grads[idx] - numeric) /
                               std::max({std::abs(grads[idx]), std::abs(numeric), 1e-6});
            ++checked;
            if (rel < 1e-4) ++passed;
        }
    }
    const double frac = static_cast<double>(passed) / static_cast<double>(checked);
    const bool ok = checked == 1000 && frac >= 0.99;
    std::printf("criterion 6: %s gradient check: %zu/%zu within 1e-4 relative (need >= 99%%)\n",
                ok ? "PASS" : "FAIL", passed, checked);
    return ok;
}

std::vector<ResultRow> run_desk_compare(const std::string& stem, const std::string& results_path) {
    ensure_desk_dataset(stem);
    const auto rows = compare_features(stem + ".train.evsc", stem + ".test.evsc",
                                       desk_experiment(1));
    write_results(results_path, rows);
    return rows;
}

bool criterion7() {
    const double t0 = now_s();
    const std::string stem = g_workdir + "/desk";
    const std::string results = g_workdir + "/compare_results.csv";
    const auto rows = run_desk_compare(stem, results);
    const auto by_kind = rows_by_kind(rows);

    const double evs_phase = by_kind.at("evs-phase").accuracy;
    const double csi_phase = by_kind.at("csi-phase").accuracy;
    const double evs_amp = by_kind.at("evs-amp").accuracy;
    const double csi_amp = by_kind.at("csi-amp").accuracy;
    const double elapsed = now_s() - t0;

    const bool phase_gap = evs_phase > csi_phase && (evs_phase - csi_phase) >= 0.10;
    const bool amp_close = evs_amp >= csi_amp - 0.02;
    const bool ok = phase_gap && amp_close && elapsed < 600.0;
    std::printf("criterion 7: %s feature comparison (desk scale, 5 runs): evs-phase %.3f vs "
                "csi-phase %.3f (need gap >= 0.10: %s), evs-amp %.3f vs csi-amp %.3f (need "
                ">= -0.02: %s), %.0f s (budget 600)\n",
                ok ? "PASS" : "FAIL", evs_phase, csi_phase, phase_gap ? "yes" : "no", evs_amp,
                csi_amp, amp_close ? "yes" : "no", elapsed);
    return ok;
}

bool criterion8() {
    const std::string stem = g_workdir + "/desk";
    ensure_desk_dataset(stem);
    const auto rows = sweep_gamma(stem + ".train.evsc", stem + ".test.evsc",
                                  {FeatureKind::kEvsAmp}, {0, 4}, desk_experiment(2));
    double acc0 = 0.0, acc4 = 0.0;
    for (const auto& r : rows) {
        if (r.gamma == 0) acc0 = r.accuracy;
        if (r.gamma == 4) acc4 = r.accuracy;
    }
    const bool ok = acc4 > acc0;
    std::printf("criterion 8: %s calibration sweep (evs-amp, 5 runs): gamma=4 %.3f vs gamma=0 "
                "%.3f (need gamma4 > gamma0)\n",
                ok ? "PASS" : "FAIL", acc4, acc0);
    return ok;
}

bool criterion9() {
    const std::string first_results = g_workdir + "/compare_results.csv";
    if (!std::filesystem::exists(first_results)) {
        run_desk_compare(g_workdir + "/desk", first_results);
    }
    // full repeat: fresh captures, fresh extraction, fresh training
    const std::string stem2 = g_workdir + "/desk-repeat";
    const std::string second_results = g_workdir + "/compare_results_repeat.csv";
    run_desk_compare(stem2, second_results);

    const std::string a = slurp(first_results);
    const std::string b = slurp(second_results);
    const bool ok = !a.empty() && a == b;
    std::printf("criterion 9: %s determinism: repeated desk comparison produced %s results "
                "file (%zu bytes)\n",
                ok ? "PASS" : "FAIL", ok ? "a byte-identical" : "a DIFFERENT", a.size());
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only.insert(std::atoi(argv[++i]));
        } else if (std::strcmp(argv[i], "--workdir") == 0 && i + 1 < argc) {
            g_workdir = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]... [--workdir PATH]\n");
            return 2;
        }
    }
    std::filesystem::create_directories(g_workdir);

    using Criterion = bool (*)();
    const Criterion criteria[9] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                   criterion6, criterion7, criterion8, criterion9};
    int failures = 0;
    for (int i = 0; i < 9; ++i) {
        if (!only.empty() && !only.count(i + 1)) continue;
        std::fflush(stdout);
        if (!criteria[i]()) ++failures;
    }
    return failures;
}
