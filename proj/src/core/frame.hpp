#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/types.hpp"

namespace evs {

/// Frame geometry: how many training and data symbols a packet carries and
/// which reference values ride on them. STF and SF exist in the air frame
/// but are never processed here, so only their counts could ever matter and
/// we do not carry them.
struct FrameLayout {
    std::size_t n_ltf = 2;
    std::size_t n_df = 50;
    std::vector<double> ltf_ref;    // +/-1 per occupied subcarrier, same on every LTF symbol
    std::vector<double> pilot_ref;  // +/-1 per pilot (in pilot_set order), same on every DF symbol

    void validate(const SubcarrierGrid& grid) const;

    std::string to_json() const;
    static FrameLayout from_json(const std::string& text);
};

/// Layout matching the default 52-bin grid: 2 LTF symbols carrying the
/// standard 52-chip training sequence, 50 data symbols, pilot polarity
/// {+1, +1, +1, -1} on {-21, -7, +7, +21}.
FrameLayout default_layout();

/// Ground truth attached to simulator output; absent on ingested captures.
struct PacketMeta {
    std::uint16_t label = 0;
    double snr_db = 0.0;
    std::vector<cx> true_csi;            // K entries
    std::vector<double> rfo_trajectory;  // N_L + N_D phases
    CMat tx_df;                          // empty when not available (e.g. re-read from file)
};

/// Frequency-domain packet: received LTF and DF symbol grids.
struct Packet {
    std::uint16_t label = 0;
    CMat ltf_rx;  // K x N_L
    CMat df_rx;   // K x N_D
    std::optional<PacketMeta> meta;

    void validate(const SubcarrierGrid& grid, const FrameLayout& layout) const;
};

class RngStream;

/// K x N_D transmit payload: pilot bins carry pilot_ref, data bins draw
/// uniformly from the order's constellation. Deterministic given the stream.
CMat random_df_payload(const FrameLayout& layout, const SubcarrierGrid& grid, int order,
                       RngStream& rng);

}  // namespace evs
