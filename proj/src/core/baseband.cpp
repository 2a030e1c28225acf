#include "core/baseband.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace evs {

std::vector<double> CsiVector::amplitude() const {
    std::vector<double> out(h_hat.size());
    for (std::size_t i = 0; i < h_hat.size(); ++i) out[i] = std::abs(h_hat[i]);
    return out;
}

std::vector<double> CsiVector::phase() const {
    std::vector<double> out(h_hat.size());
    for (std::size_t i = 0; i < h_hat.size(); ++i) out[i] = safe_phase(h_hat[i]);
    return out;
}

CsiVector estimate_csi(const CMat& ltf_rx, const std::vector<double>& ltf_ref) {
    if (ltf_rx.rows != ltf_ref.size())
        throw InvalidInput("estimate_csi: reference length does not match LTF rows");
    if (ltf_rx.cols == 0) throw InvalidInput("estimate_csi: no LTF symbols");
    for (double v : ltf_ref) {
        if (v != 1.0 && v != -1.0) throw InvalidInput("estimate_csi: ltf_ref entries must be +/-1");
    }
    CsiVector csi;
    csi.h_hat.resize(ltf_rx.rows);
    const double inv_n = 1.0 / static_cast<double>(ltf_rx.cols);
    for (std::size_t k = 0; k < ltf_rx.rows; ++k) {
        cx acc{0.0, 0.0};
        for (std::size_t n = 0; n < ltf_rx.cols; ++n) acc += ltf_rx.at(k, n) * ltf_ref[k];
        csi.h_hat[k] = acc * inv_n;
    }
    return csi;
}

RfoEstimate estimate_rfo(const CMat& df_rx, const CsiVector& csi, const SubcarrierGrid& grid,
                         const FrameLayout& layout, RfoEstimatorMode mode) {
    if (grid.pilot_set.empty()) throw InvalidInput("estimate_rfo: pilot set is empty");
    if (csi.h_hat.size() != df_rx.rows) throw InvalidInput("estimate_rfo: CSI/DF size mismatch");

    std::vector<std::size_t> pilot_rows;
    pilot_rows.reserve(grid.pilot_set.size());
    for (int p : grid.pilot_set) {
        const int row = grid.row_of(p);
        if (row < 0) throw InvalidInput("estimate_rfo: pilot index not in grid");
        if (std::abs(csi.h_hat[static_cast<std::size_t>(row)]) == 0.0)
            throw InvalidInput("estimate_rfo: CSI vanishes on pilot subcarrier " + std::to_string(p));
        pilot_rows.push_back(static_cast<std::size_t>(row));
    }

    double pilot_power = 0.0;
    for (std::size_t row : pilot_rows) pilot_power += std::norm(csi.h_hat[row]);

    RfoEstimate est;
    est.phi_hat.resize(df_rx.cols);
    if (mode == RfoEstimatorMode::kStandard) est.gain.resize(df_rx.cols);
    for (std::size_t n = 0; n < df_rx.cols; ++n) {
        cx acc{0.0, 0.0};
        for (std::size_t i = 0; i < pilot_rows.size(); ++i) {
            const std::size_t row = pilot_rows[i];
            if (mode == RfoEstimatorMode::kStandard) {
                acc += df_rx.at(row, n) * std::conj(csi.h_hat[row]) * layout.pilot_ref[i];
            } else {
                acc += df_rx.at(row, n) * csi.h_hat[row];
            }
        }
        if (acc == cx(0.0, 0.0))
            throw DegenerateEstimate("estimate_rfo: pilot accumulator is zero on symbol " +
                                     std::to_string(n));
        est.phi_hat[n] = safe_phase(acc, 0.0);
        if (mode == RfoEstimatorMode::kStandard) est.gain[n] = std::abs(acc) / pilot_power;
    }
    return est;
}

EqualizedSymbols equalize(const CMat& df_rx, const CsiVector& csi, const RfoEstimate& rfo,
                          const SubcarrierGrid& grid) {
    if (csi.h_hat.size() != df_rx.rows) throw InvalidInput("equalize: CSI/DF size mismatch");
    if (rfo.phi_hat.size() != df_rx.cols) throw InvalidInput("equalize: RFO/DF size mismatch");
    if (!rfo.gain.empty() && rfo.gain.size() != rfo.phi_hat.size())
        throw InvalidInput("equalize: RFO gain length mismatch");

    for (std::size_t k = 0; k < csi.h_hat.size(); ++k) {
        if (std::abs(csi.h_hat[k]) <= 1e-12)
            throw SingularEqualizer(grid.occupied.size() == csi.h_hat.size()
                                        ? grid.occupied[k]
                                        : static_cast<int>(k));
    }

    EqualizedSymbols eq;
    eq.x_bar = CMat(df_rx.rows, df_rx.cols);
    std::vector<cx> q(csi.h_hat.size());
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = 1.0 / csi.h_hat[k];
    for (std::size_t n = 0; n < df_rx.cols; ++n) {
        const double g = rfo.gain.empty() ? 1.0 : rfo.gain[n];
        if (g <= 0.0) throw InvalidInput("equalize: nonpositive RFO gain");
        const cx rot = std::polar(1.0 / g, -rfo.phi_hat[n]);
        for (std::size_t k = 0; k < df_rx.rows; ++k) {
            eq.x_bar.at(k, n) = rot * q[k] * df_rx.at(k, n);
        }
    }
    return eq;
}

}  // namespace evs
