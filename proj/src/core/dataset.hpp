#pragma once

#include <cstdint>
#include <string>

#include "core/channel.hpp"
#include "core/frame.hpp"
#include "core/grid.hpp"

namespace evs {

struct GenParams {
    std::size_t train_per_label = 400;
    std::size_t test_per_label = 100;
    double snr_db = 20.0;
    double cfo_hz = 0.0;
    int order = 4;
    std::uint64_t seed = 1;
};

struct GenSummary {
    std::size_t labels = 0;
    std::size_t train_packets = 0;
    std::size_t test_packets = 0;
    std::string train_path;
    std::string test_path;
};

/// Writes <out_stem>.train.evsc and <out_stem>.test.evsc. Packets are
/// grouped by label; each packet draws its payload, initial phase and noise
/// from a stream keyed by (seed, split, label, index), so the output is a
/// pure function of the parameters.
GenSummary generate_dataset(const Scene& scene, const SubcarrierGrid& grid,
                            const FrameLayout& layout, const GenParams& params,
                            const std::string& out_stem);

/// Single simulated packet, same streams as generate_dataset.
Packet simulate_packet(const SubcarrierGrid& grid, const FrameLayout& layout,
                       const MultipathProfile& profile, const GenParams& params, bool test_split,
                       std::uint16_t label, std::size_t index);

}  // namespace evs
