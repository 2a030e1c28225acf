#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "core/frame.hpp"
#include "core/grid.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace evs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

/// Distance from point p to the segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

struct WallReflector {
    Vec2 a;
    Vec2 b;
    double loss = 0.3;  // amplitude factor applied on reflection
};

/// Room geometry for one measurement campaign: a transmit/receive pair, a
/// 5x5 grid of person spots plus the empty-room case, and first-order wall
/// reflectors.
struct Scene {
    double room_width = 7.0;
    double room_depth = 6.0;
    Vec2 tx{0.5, 3.0};
    Vec2 rx{6.5, 3.0};
    std::vector<Vec2> spots;  // exactly 25
    std::vector<WallReflector> walls;
    double person_scatter_loss = 0.5;
    double blocking_extra_loss_db = 10.0;
    double blocking_radius_m = 0.3;

    /// 25 spots + empty room.
    std::size_t num_labels() const { return spots.size() + 1; }

    void validate() const;

    std::string to_json() const;
    static Scene from_json(const std::string& text);
    static Scene load(const std::string& path);
};

/// 7 m x 6 m room, spots spaced 0.75 m starting at (2.0, 1.5), walls with
/// amplitude reflection loss 0.3.
Scene default_scene();

/// One propagation path: total length and complex base gain.
struct PropagationPath {
    double length_m = 0.0;
    cx gain{0.0, 0.0};
};

/// Geometric multipath description for one label.
struct MultipathProfile {
    std::vector<PropagationPath> paths;

    /// Per-subcarrier response: sum over paths of gain * exp(-j 2 pi d / lambda_k).
    std::vector<cx> response(const SubcarrierGrid& grid) const;
};

/// Per-symbol common phase rotation model: a constant carrier frequency
/// offset turning into a linear phase ramp over the symbol index.
struct RfoModel {
    double cfo_hz = 0.0;
    double symbol_duration_s = 4e-6;

    double phase_at(double initial_phase, std::size_t symbol_index) const {
        return initial_phase + 2.0 * std::numbers::pi * cfo_hz * symbol_duration_s *
                                   static_cast<double>(symbol_index);
    }
};

/// Deterministic path set for a label: line of sight, one first-order
/// reflection per wall, and (for occupied labels) a scatter path via the
/// person. Paths shadowed by the person take the extra blocking loss.
/// Location 0 is the empty room; 1..25 map to scene spots.
MultipathProfile build_profile(const Scene& scene, int location, const SubcarrierGrid& grid);

/// y[k][n] = exp(-j phi_n) * h[k] * x[k][n] + w[k][n] over the whole frame
/// (LTF then DF). snr_db = +inf disables noise. Fills Packet.meta with the
/// ground truth.
Packet apply_channel(const SubcarrierGrid& grid, const FrameLayout& layout,
                     const MultipathProfile& profile, const RfoModel& rfo, double initial_phase,
                     const CMat& tx_df, double snr_db, std::uint16_t label, RngStream& rng);

}  // namespace evs
