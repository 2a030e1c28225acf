#include "core/grid.hpp"

#include <algorithm>

#include <json.hpp>

#include "core/errors.hpp"

namespace evs {

std::vector<int> SubcarrierGrid::data_set() const {
    std::vector<int> out;
    out.reserve(occupied.size());
    for (int idx : occupied) {
        if (!is_pilot(idx)) out.push_back(idx);
    }
    return out;
}

int SubcarrierGrid::row_of(int logical_index) const {
    auto it = std::lower_bound(occupied.begin(), occupied.end(), logical_index);
    if (it == occupied.end() || *it != logical_index) return -1;
    return static_cast<int>(it - occupied.begin());
}

bool SubcarrierGrid::is_pilot(int logical_index) const {
    return std::find(pilot_set.begin(), pilot_set.end(), logical_index) != pilot_set.end();
}

void SubcarrierGrid::validate() const {
    if (occupied.empty()) throw InvalidInput("grid: no occupied subcarriers");
    for (std::size_t i = 0; i < occupied.size(); ++i) {
        if (occupied[i] == 0) throw InvalidInput("grid: DC bin cannot be occupied");
        if (i > 0 && occupied[i] <= occupied[i - 1])
            throw InvalidInput("grid: occupied indices must be strictly increasing");
    }
    for (int p : pilot_set) {
        if (row_of(p) < 0)
            throw InvalidInput("grid: pilot index " + std::to_string(p) + " not occupied");
    }
    if (pilot_set.size() >= occupied.size())
        throw InvalidInput("grid: pilots must leave room for data bins");
    if (subcarrier_spacing_hz <= 0.0) throw InvalidInput("grid: spacing must be positive");
    if (center_freq_hz <= 0.0) throw InvalidInput("grid: carrier must be positive");
}

std::string SubcarrierGrid::to_json() const {
    nlohmann::json j;
    j["total_bins"] = total_bins;
    j["occupied"] = occupied;
    j["pilot_set"] = pilot_set;
    j["center_freq_hz"] = center_freq_hz;
    j["subcarrier_spacing_hz"] = subcarrier_spacing_hz;
    return j.dump(2);
}

SubcarrierGrid SubcarrierGrid::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("grid json: ") + e.what(), e.byte);
    }
    SubcarrierGrid g;
    try {
        g.total_bins = j.at("total_bins").get<int>();
        g.occupied = j.at("occupied").get<std::vector<int>>();
        g.pilot_set = j.at("pilot_set").get<std::vector<int>>();
        g.center_freq_hz = j.at("center_freq_hz").get<double>();
        g.subcarrier_spacing_hz = j.at("subcarrier_spacing_hz").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("grid json: ") + e.what(), 0);
    }
    g.validate();
    return g;
}

SubcarrierGrid default_grid() {
    SubcarrierGrid g;
    g.occupied.reserve(52);
    for (int i = -26; i <= 26; ++i) {
        if (i != 0) g.occupied.push_back(i);
    }
    g.pilot_set = {-21, -7, 7, 21};
    return g;
}

}  // namespace evs
