#pragma once

#include <vector>

#include "core/frame.hpp"
#include "core/grid.hpp"
#include "core/types.hpp"

namespace evs {

/// Per-subcarrier channel estimate.
struct CsiVector {
    std::vector<cx> h_hat;

    std::vector<double> amplitude() const;
    std::vector<double> phase() const;  // entries in (-pi, pi]
};

/// Per-DF-symbol common phase estimate. `gain` is the magnitude of the same
/// pilot accumulator relative to the pilot CSI power (the least-squares
/// common gain of the symbol); when present the equalizer divides it out,
/// which removes the amplitude bias that averaging rotating LTF symbols
/// leaves in the channel estimate. Empty gain = phase-only correction.
struct RfoEstimate {
    std::vector<double> phi_hat;  // entries in (-pi, pi]
    std::vector<double> gain;     // same length as phi_hat, or empty
};

/// Zero-forced, de-rotated data symbols.
struct EqualizedSymbols {
    CMat x_bar;  // K x N_D
};

/// Sample-average channel estimate from the LTF block:
/// h_hat[k] = (1/N_L) * sum_n y[k][n] * ltf_ref[k]. No smoothing across
/// subcarriers.
CsiVector estimate_csi(const CMat& ltf_rx, const std::vector<double>& ltf_ref);

enum class RfoEstimatorMode {
    /// Conjugate-and-polarity pilot tracker:
    /// phi_hat[n] = arg( sum_psi y[psi][n] * conj(h_hat[psi]) * pilot_ref[psi] ).
    kStandard,
    /// Plain product form, no conjugate and no polarity. Kept for
    /// documentation/diagnosis; the angle picks up twice the channel phase
    /// and ignores pilot signs, so it is not used by the pipeline.
    kLiteralProduct,
};

/// Tracks the common DF-symbol phase relative to the LTF-time reference.
/// Sign convention: multiplying a DF symbol by exp(-j phi_hat[n]) cancels
/// the residual rotation, i.e. noise-free equalized symbols land exactly on
/// the transmitted points.
RfoEstimate estimate_rfo(const CMat& df_rx, const CsiVector& csi, const SubcarrierGrid& grid,
                         const FrameLayout& layout, RfoEstimatorMode mode = RfoEstimatorMode::kStandard);

/// x_bar[k][n] = exp(-j phi_hat[n]) * y[k][n] / (h_hat[k] * gain[n]).
/// Noise-free this lands exactly on the transmitted symbols for any offset
/// trajectory. Throws SingularEqualizer naming the subcarrier when
/// |h_hat[k]| <= 1e-12.
EqualizedSymbols equalize(const CMat& df_rx, const CsiVector& csi, const RfoEstimate& rfo,
                          const SubcarrierGrid& grid);

}  // namespace evs
