#include "core/evs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/constellation.hpp"
#include "core/errors.hpp"

namespace evs {

std::vector<double> EvsVector::amplitude() const {
    std::vector<double> out(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) out[i] = std::abs(eps[i]);
    return out;
}

std::vector<double> EvsVector::phase() const {
    std::vector<double> out(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) out[i] = safe_phase(eps[i]);
    return out;
}

const char* feature_kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::kCsiAmp: return "csi-amp";
        case FeatureKind::kCsiPhase: return "csi-phase";
        case FeatureKind::kEvsAmp: return "evs-amp";
        case FeatureKind::kEvsPhase: return "evs-phase";
    }
    return "?";
}

FeatureKind feature_kind_from_name(const std::string& name) {
    if (name == "csi-amp") return FeatureKind::kCsiAmp;
    if (name == "csi-phase") return FeatureKind::kCsiPhase;
    if (name == "evs-amp") return FeatureKind::kEvsAmp;
    if (name == "evs-phase") return FeatureKind::kEvsPhase;
    throw InvalidInput("unknown feature kind '" + name +
                       "' (expected csi-amp|csi-phase|evs-amp|evs-phase)");
}

namespace {

/// One k-means run for a candidate order. Returns the combined score.
double kmeans_score(const std::vector<cx>& points, const Constellation& canon) {
    constexpr int kMaxIter = 50;
    constexpr double kTol = 1e-6;

    std::vector<cx> cent = canon.points;
    std::vector<std::size_t> assign(points.size(), 0);

    for (int iter = 0; iter < kMaxIter; ++iter) {
        // assignment step
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t bi = 0;
            for (std::size_t c = 0; c < cent.size(); ++c) {
                const double d = std::norm(points[i] - cent[c]);
                if (d < best) {
                    best = d;
                    bi = c;
                }
            }
            assign[i] = bi;
        }
        // update step; empty clusters keep their centroid
        std::vector<cx> sum(cent.size(), cx(0.0, 0.0));
        std::vector<std::size_t> cnt(cent.size(), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sum[assign[i]] += points[i];
            ++cnt[assign[i]];
        }
        double moved = 0.0;
        for (std::size_t c = 0; c < cent.size(); ++c) {
            if (cnt[c] == 0) continue;
            const cx nc = sum[c] / static_cast<double>(cnt[c]);
            moved = std::max(moved, std::abs(nc - cent[c]));
            cent[c] = nc;
        }
        if (moved <= kTol) break;
    }

    double cent_to_canon = 0.0;
    for (const cx& c : cent) cent_to_canon += std::norm(c - canon.points[canon.nearest(c)]);
    cent_to_canon /= static_cast<double>(cent.size());

    double distortion = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) distortion += std::norm(points[i] - cent[assign[i]]);
    distortion /= static_cast<double>(points.size());

    return cent_to_canon + distortion;
}

}  // namespace

int classify_modulation(const EqualizedSymbols& x_bar, const SubcarrierGrid& grid) {
    std::vector<cx> points;
    points.reserve(x_bar.x_bar.rows * x_bar.x_bar.cols);
    for (std::size_t k = 0; k < x_bar.x_bar.rows; ++k) {
        if (grid.is_pilot(grid.occupied[k])) continue;
        for (std::size_t n = 0; n < x_bar.x_bar.cols; ++n) points.push_back(x_bar.x_bar.at(k, n));
    }
    if (points.size() < 64)
        throw InsufficientData("classify_modulation: need at least 64 data symbols, have " +
                               std::to_string(points.size()));

    static const int kOrders[4] = {2, 4, 16, 64};
    int best_order = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int order : kOrders) {
        const double s = kmeans_score(points, make_constellation(order));
        if (s < best_score) {  // strict: ties stay with the smaller order
            best_score = s;
            best_order = order;
        }
    }
    return best_order;
}

CMat hard_decide(const EqualizedSymbols& x_bar, int order, const SubcarrierGrid& grid,
                 const FrameLayout& layout) {
    const Constellation c = make_constellation(order);
    const CMat& x = x_bar.x_bar;
    CMat out(x.rows, x.cols);
    for (std::size_t k = 0; k < x.rows; ++k) {
        const int idx = grid.occupied[k];
        int pilot_pos = -1;
        for (std::size_t p = 0; p < grid.pilot_set.size(); ++p) {
            if (grid.pilot_set[p] == idx) pilot_pos = static_cast<int>(p);
        }
        for (std::size_t n = 0; n < x.cols; ++n) {
            if (pilot_pos >= 0) {
                out.at(k, n) = cx(layout.pilot_ref[pilot_pos], 0.0);
            } else {
                out.at(k, n) = c.points[c.quantize(x.at(k, n))];
            }
        }
    }
    return out;
}

RawEvsMatrix raw_evs(const EqualizedSymbols& x_bar, const CMat& x_hat) {
    if (!x_bar.x_bar.same_shape(x_hat)) throw InvalidInput("raw_evs: shape mismatch");
    RawEvsMatrix m;
    m.e_r = CMat(x_hat.rows, x_hat.cols);
    for (std::size_t i = 0; i < x_hat.v.size(); ++i) m.e_r.v[i] = x_bar.x_bar.v[i] - x_hat.v[i];
    return m;
}

RawEvsVector average_evs(const RawEvsMatrix& e_r) {
    if (e_r.e_r.cols == 0) throw InvalidInput("average_evs: no symbols");
    RawEvsVector v;
    v.eps_bar.resize(e_r.e_r.rows);
    const double inv_n = 1.0 / static_cast<double>(e_r.e_r.cols);
    for (std::size_t k = 0; k < e_r.e_r.rows; ++k) {
        cx acc{0.0, 0.0};
        for (std::size_t n = 0; n < e_r.e_r.cols; ++n) acc += e_r.e_r.at(k, n);
        v.eps_bar[k] = acc * inv_n;
    }
    return v;
}

EvsVector calibrate(const RawEvsVector& current, const std::deque<RawEvsVector>& history, int gamma) {
    if (history.empty()) throw InvalidInput("calibrate: empty history window");
    if (gamma < 0) throw InvalidInput("calibrate: gamma must be >= 0");
    const std::size_t k = current.eps_bar.size();
    for (const auto& h : history) {
        if (h.eps_bar.size() != k) throw InvalidInput("calibrate: window entry length mismatch");
    }

    const double two_g = std::ldexp(1.0, gamma);  // 2^gamma
    const double w_now = 1.0 / two_g;
    const double w_hist = (two_g - 1.0) / two_g;
    const double inv_t = 1.0 / static_cast<double>(history.size());

    EvsVector out;
    out.eps.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        cx mean{0.0, 0.0};
        for (const auto& h : history) mean += h.eps_bar[i];
        mean *= inv_t;
        out.eps[i] = w_now * current.eps_bar[i] + w_hist * mean;
    }
    return out;
}

const std::deque<RawEvsVector>& CalibrationWindows::push(std::uint16_t label, RawEvsVector v) {
    auto& w = windows_[label];
    w.push_back(std::move(v));
    if (w.size() > capacity_) w.pop_front();
    return w;
}

FeatureVector extract_features(const Packet& packet, const SubcarrierGrid& grid,
                               const FrameLayout& layout, const FeatureConfig& config,
                               CalibrationWindows* windows) {
    packet.validate(grid, layout);

    FeatureVector fv;
    fv.kind = config.kind;
    fv.label = packet.label;

    const CsiVector csi = estimate_csi(packet.ltf_rx, layout.ltf_ref);
    if (config.kind == FeatureKind::kCsiAmp) {
        fv.values = csi.amplitude();
        return fv;
    }
    if (config.kind == FeatureKind::kCsiPhase) {
        fv.values = csi.phase();
        return fv;
    }

    if (!windows) throw InvalidInput("extract_features: EVS kinds require calibration windows");

    const RfoEstimate rfo = estimate_rfo(packet.df_rx, csi, grid, layout);
    const EqualizedSymbols eq = equalize(packet.df_rx, csi, rfo, grid);
    const int order = config.order_hint != 0 ? config.order_hint : classify_modulation(eq, grid);
    const CMat x_hat = hard_decide(eq, order, grid, layout);
    const RawEvsVector avg = average_evs(raw_evs(eq, x_hat));
    const auto& window = windows->push(packet.label, avg);
    const EvsVector cal = calibrate(window.back(), window, config.gamma);

    fv.values = config.kind == FeatureKind::kEvsAmp ? cal.amplitude() : cal.phase();
    return fv;
}

}  // namespace evs
