#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "core/baseband.hpp"
#include "core/frame.hpp"
#include "core/grid.hpp"
#include "core/types.hpp"

namespace evs {

/// Residual error per subcarrier and symbol.
struct RawEvsMatrix {
    CMat e_r;  // K x N_D
};

/// Symbol-averaged residual, one complex value per subcarrier.
struct RawEvsVector {
    std::vector<cx> eps_bar;
};

/// Calibrated error vector spectrum.
struct EvsVector {
    std::vector<cx> eps;

    std::vector<double> amplitude() const;
    std::vector<double> phase() const;  // entries in (-pi, pi], 0 for vanished entries
};

enum class FeatureKind { kCsiAmp, kCsiPhase, kEvsAmp, kEvsPhase };

const char* feature_kind_name(FeatureKind k);
FeatureKind feature_kind_from_name(const std::string& name);

struct FeatureVector {
    FeatureKind kind = FeatureKind::kCsiAmp;
    std::uint16_t label = 0;
    std::vector<double> values;  // length K
};

/// Modulation order of an equalized frame via k-means over the data bins.
/// For each candidate order, Lloyd iterations start from the canonical
/// constellation, capped at 50 rounds with centroid-motion tolerance 1e-6;
/// the score adds mean squared centroid-to-canonical distance and mean
/// within-cluster distortion. Smallest score wins, ties toward the smaller
/// order. Requires at least 64 data-bin symbols.
int classify_modulation(const EqualizedSymbols& x_bar, const SubcarrierGrid& grid);

/// Nearest-constellation-point decision on every data cell; pilot cells are
/// pinned to pilot_ref. Distance ties resolve toward the smaller canonical
/// point index.
CMat hard_decide(const EqualizedSymbols& x_bar, int order, const SubcarrierGrid& grid,
                 const FrameLayout& layout);

/// Residual between the equalized symbols and the decided references.
/// equalize() already rotated x_bar into the reference frame, so the
/// per-symbol re-rotation of the references cancels against it and the
/// comparison is frame-free: correct decisions leave noise only.
RawEvsMatrix raw_evs(const EqualizedSymbols& x_bar, const CMat& x_hat);

/// Complex mean over the symbol axis.
RawEvsVector average_evs(const RawEvsMatrix& e_r);

/// eps[k] = current[k]/2^gamma + (2^gamma - 1)/2^gamma * mean_t history[t][k].
/// `history` must be nonempty and is expected to contain `current` as its
/// newest element.
EvsVector calibrate(const RawEvsVector& current, const std::deque<RawEvsVector>& history, int gamma);

/// Per-label sliding windows over a packet stream, newest element last.
class CalibrationWindows {
public:
    explicit CalibrationWindows(std::size_t capacity) : capacity_(capacity) {}

    /// Appends and returns the label's window (including the new element).
    const std::deque<RawEvsVector>& push(std::uint16_t label, RawEvsVector v);

    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::map<std::uint16_t, std::deque<RawEvsVector>> windows_;
};

struct FeatureConfig {
    FeatureKind kind = FeatureKind::kEvsAmp;
    int gamma = 0;
    int order_hint = 0;  // 0 = classify per packet
};

/// Full per-packet pipeline: CSI estimation, then (for EVS kinds) pilot
/// phase tracking, equalization, modulation classification, hard decision,
/// residual averaging and calibration against the label's sliding window.
/// CSI kinds stop after the channel estimate. `windows` may be null for CSI
/// kinds.
FeatureVector extract_features(const Packet& packet, const SubcarrierGrid& grid,
                               const FrameLayout& layout, const FeatureConfig& config,
                               CalibrationWindows* windows);

}  // namespace evs
