#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace evs {

/// Occupied-subcarrier layout of a 20 MHz legacy OFDM channel. Only the K
/// used bins are materialized; DC and guard bins never appear.
struct SubcarrierGrid {
    int total_bins = 64;
    std::vector<int> occupied;   // logical indices, strictly increasing, no 0
    std::vector<int> pilot_set;  // subset of occupied
    double center_freq_hz = 5.22e9;
    double subcarrier_spacing_hz = 312500.0;

    std::size_t num_subcarriers() const { return occupied.size(); }

    /// Data bins = occupied minus pilots, in occupied order.
    std::vector<int> data_set() const;

    /// Row position of a logical index within `occupied`; -1 if absent.
    int row_of(int logical_index) const;

    bool is_pilot(int logical_index) const;

    /// Carrier frequency of row k.
    double freq_hz(std::size_t row) const {
        return center_freq_hz + occupied[row] * subcarrier_spacing_hz;
    }

    /// Throws InvalidInput when any structural invariant is broken.
    void validate() const;

    std::string to_json() const;
    static SubcarrierGrid from_json(const std::string& text);
};

/// 52-subcarrier grid with the four standard pilots at +/-7 and +/-21.
SubcarrierGrid default_grid();

}  // namespace evs
