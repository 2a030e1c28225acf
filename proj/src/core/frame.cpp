#include "core/frame.hpp"

#include <json.hpp>

#include "core/constellation.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace evs {

namespace {

// Standard legacy long-training sequence over bins -26..-1, +1..+26.
constexpr int kLtfChips[52] = {
    1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1,
    1, -1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1};

}  // namespace

void FrameLayout::validate(const SubcarrierGrid& grid) const {
    if (n_ltf < 1) throw InvalidInput("layout: n_ltf must be >= 1");
    if (n_df < 1) throw InvalidInput("layout: n_df must be >= 1");
    if (ltf_ref.size() != grid.num_subcarriers())
        throw InvalidInput("layout: ltf_ref length must equal K");
    for (double v : ltf_ref) {
        if (v != 1.0 && v != -1.0) throw InvalidInput("layout: ltf_ref entries must be +/-1");
    }
    if (pilot_ref.size() != grid.pilot_set.size())
        throw InvalidInput("layout: pilot_ref length must equal pilot count");
    for (double v : pilot_ref) {
        if (v != 1.0 && v != -1.0) throw InvalidInput("layout: pilot_ref entries must be +/-1");
    }
}

std::string FrameLayout::to_json() const {
    nlohmann::json j;
    j["n_ltf"] = n_ltf;
    j["n_df"] = n_df;
    j["ltf_ref"] = ltf_ref;
    j["pilot_ref"] = pilot_ref;
    return j.dump(2);
}

FrameLayout FrameLayout::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("layout json: ") + e.what(), e.byte);
    }
    FrameLayout l;
    try {
        l.n_ltf = j.at("n_ltf").get<std::size_t>();
        l.n_df = j.at("n_df").get<std::size_t>();
        l.ltf_ref = j.at("ltf_ref").get<std::vector<double>>();
        l.pilot_ref = j.at("pilot_ref").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("layout json: ") + e.what(), 0);
    }
    return l;
}

FrameLayout default_layout() {
    FrameLayout l;
    l.n_ltf = 2;
    l.n_df = 50;
    l.ltf_ref.assign(std::begin(kLtfChips), std::end(kLtfChips));
    l.pilot_ref = {1.0, 1.0, 1.0, -1.0};
    return l;
}

CMat random_df_payload(const FrameLayout& layout, const SubcarrierGrid& grid, int order,
                       RngStream& rng) {
    const Constellation c = make_constellation(order);
    const std::size_t k = grid.num_subcarriers();
    CMat tx(k, layout.n_df);
    for (std::size_t row = 0; row < k; ++row) {
        const int idx = grid.occupied[row];
        int pilot_pos = -1;
        for (std::size_t p = 0; p < grid.pilot_set.size(); ++p) {
            if (grid.pilot_set[p] == idx) pilot_pos = static_cast<int>(p);
        }
        for (std::size_t n = 0; n < layout.n_df; ++n) {
            if (pilot_pos >= 0) {
                tx.at(row, n) = cx(layout.pilot_ref[pilot_pos], 0.0);
            } else {
                tx.at(row, n) = c.points[rng.uniform_int(c.points.size())];
            }
        }
    }
    return tx;
}

void Packet::validate(const SubcarrierGrid& grid, const FrameLayout& layout) const {
    const std::size_t k = grid.num_subcarriers();
    if (ltf_rx.rows != k || ltf_rx.cols != layout.n_ltf)
        throw InvalidInput("packet: LTF matrix shape mismatch");
    if (df_rx.rows != k || df_rx.cols != layout.n_df)
        throw InvalidInput("packet: DF matrix shape mismatch");
    if (meta) {
        if (meta->true_csi.size() != k) throw InvalidInput("packet: meta CSI length mismatch");
        if (meta->rfo_trajectory.size() != layout.n_ltf + layout.n_df)
            throw InvalidInput("packet: meta trajectory length mismatch");
    }
}

}  // namespace evs
