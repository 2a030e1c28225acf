#include "core/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace evs {

namespace {
constexpr double kPi = std::numbers::pi;

double db_to_amplitude(double loss_db) { return std::pow(10.0, -loss_db / 20.0); }

Vec2 mirror_across_line(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    const Vec2 foot{a.x + t * dx, a.y + t * dy};
    return Vec2{2.0 * foot.x - p.x, 2.0 * foot.y - p.y};
}

}  // namespace

double distance(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return distance(p, a);
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, Vec2{a.x + t * dx, a.y + t * dy});
}

void Scene::validate() const {
    if (room_width <= 0.0 || room_depth <= 0.0) throw InvalidInput("scene: room must be positive");
    auto inside = [&](const Vec2& p) {
        return p.x >= 0.0 && p.x <= room_width && p.y >= 0.0 && p.y <= room_depth;
    };
    if (!inside(tx)) throw InvalidInput("scene: tx outside room");
    if (!inside(rx)) throw InvalidInput("scene: rx outside room");
    if (spots.size() != 25) throw InvalidInput("scene: expected exactly 25 spots");
    for (const auto& s : spots) {
        if (!inside(s)) throw InvalidInput("scene: spot outside room");
    }
    if (person_scatter_loss <= 0.0) throw InvalidInput("scene: scatter loss must be positive");
    if (blocking_radius_m < 0.0) throw InvalidInput("scene: blocking radius must be >= 0");
}

std::string Scene::to_json() const {
    nlohmann::json j;
    j["room"] = {{"width", room_width}, {"depth", room_depth}};
    j["tx_pos"] = {tx.x, tx.y};
    j["rx_pos"] = {rx.x, rx.y};
    nlohmann::json sp = nlohmann::json::array();
    for (const auto& s : spots) sp.push_back({s.x, s.y});
    j["spot_grid"] = sp;
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : walls) ws.push_back({{"a", {w.a.x, w.a.y}}, {"b", {w.b.x, w.b.y}}, {"loss", w.loss}});
    j["wall_reflectors"] = ws;
    j["person_scatter_loss"] = person_scatter_loss;
    j["blocking_extra_loss_db"] = blocking_extra_loss_db;
    j["blocking_radius_m"] = blocking_radius_m;
    return j.dump(2);
}

Scene Scene::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scene json: ") + e.what(), e.byte);
    }
    Scene s;
    try {
        s.room_width = j.at("room").at("width").get<double>();
        s.room_depth = j.at("room").at("depth").get<double>();
        s.tx = {j.at("tx_pos").at(0).get<double>(), j.at("tx_pos").at(1).get<double>()};
        s.rx = {j.at("rx_pos").at(0).get<double>(), j.at("rx_pos").at(1).get<double>()};
        s.spots.clear();
        if (j.contains("spot_grid") && j.at("spot_grid").is_array()) {
            for (const auto& e : j.at("spot_grid"))
                s.spots.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        } else {
            // origin/spacing shorthand
            const auto& g = j.at("spot_layout");
            const double ox = g.at("origin").at(0).get<double>();
            const double oy = g.at("origin").at(1).get<double>();
            const double sp = g.at("spacing").get<double>();
            const int rows = g.at("rows").get<int>();
            const int cols = g.at("cols").get<int>();
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    s.spots.push_back({ox + c * sp, oy + r * sp});
        }
        s.walls.clear();
        for (const auto& e : j.at("wall_reflectors")) {
            WallReflector w;
            w.a = {e.at("a").at(0).get<double>(), e.at("a").at(1).get<double>()};
            w.b = {e.at("b").at(0).get<double>(), e.at("b").at(1).get<double>()};
            w.loss = e.at("loss").get<double>();
            s.walls.push_back(w);
        }
        s.person_scatter_loss = j.at("person_scatter_loss").get<double>();
        s.blocking_extra_loss_db = j.at("blocking_extra_loss_db").get<double>();
        s.blocking_radius_m = j.at("blocking_radius_m").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene json: ") + e.what(), 0);
    }
    s.validate();
    return s;
}

Scene Scene::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scene file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

Scene default_scene() {
    Scene s;
    s.room_width = 7.0;
    s.room_depth = 6.0;
    // tx/rx sit off the spot-grid symmetry axes so no two spots share the
    // same scatter geometry
    s.tx = {0.6, 2.2};
    s.rx = {6.4, 3.7};
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) s.spots.push_back({2.0 + c * 0.75, 1.5 + r * 0.75});
    const double w = s.room_width, d = s.room_depth;
    s.walls = {
        {{0.0, 0.0}, {w, 0.0}, 0.3},  // south
        {{0.0, d}, {w, d}, 0.3},      // north
        {{0.0, 0.0}, {0.0, d}, 0.3},  // west
        {{w, 0.0}, {w, d}, 0.3},      // east
    };
    return s;
}

std::vector<cx> MultipathProfile::response(const SubcarrierGrid& grid) const {
    const std::size_t k = grid.num_subcarriers();
    std::vector<cx> h(k);
    for (std::size_t row = 0; row < k; ++row) {
        const double lambda = kSpeedOfLight / grid.freq_hz(row);
        cx acc{0.0, 0.0};
        for (const auto& p : paths) {
            acc += p.gain * std::polar(1.0, -2.0 * kPi * p.length_m / lambda);
        }
        h[row] = acc;
    }
    return h;
}

namespace {

/// Paths for the given geometry. The polyline of each path is tested
/// against the person for shadowing.
MultipathProfile profile_for_geometry(const Scene& scene, const Vec2* person) {
    MultipathProfile prof;
    const double block_amp = db_to_amplitude(scene.blocking_extra_loss_db);

    auto blocked = [&](const std::vector<Vec2>& poly) {
        if (!person) return false;
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
            if (point_segment_distance(*person, poly[i], poly[i + 1]) <= scene.blocking_radius_m)
                return true;
        }
        return false;
    };

    // line of sight
    {
        PropagationPath p;
        p.length_m = distance(scene.tx, scene.rx);
        double amp = 1.0 / p.length_m;
        if (blocked({scene.tx, scene.rx})) amp *= block_amp;
        p.gain = cx(amp, 0.0);
        prof.paths.push_back(p);
    }

    // one first-order image per wall
    for (const auto& wall : scene.walls) {
        const Vec2 img = mirror_across_line(scene.tx, wall.a, wall.b);
        const double len = distance(img, scene.rx);
        // reflection point: where the image->rx segment crosses the wall line
        const double dx = scene.rx.x - img.x;
        const double dy = scene.rx.y - img.y;
        const double wx = wall.b.x - wall.a.x;
        const double wy = wall.b.y - wall.a.y;
        const double denom = dx * wy - dy * wx;
        const double t =
            denom == 0.0 ? 0.5 : ((wall.a.x - img.x) * wy - (wall.a.y - img.y) * wx) / denom;
        const Vec2 refl{img.x + t * dx, img.y + t * dy};
        PropagationPath p;
        p.length_m = len;
        double amp = wall.loss / len;
        if (blocked({scene.tx, refl, scene.rx})) amp *= block_amp;
        p.gain = cx(amp, 0.0);
        prof.paths.push_back(p);
    }

    // scatter via the person
    if (person) {
        PropagationPath p;
        p.length_m = distance(scene.tx, *person) + distance(*person, scene.rx);
        double amp = scene.person_scatter_loss / p.length_m;
        if (blocked({scene.tx, *person, scene.rx})) amp *= block_amp;
        p.gain = cx(amp, 0.0);
        prof.paths.push_back(p);
    }
    return prof;
}

}  // namespace

MultipathProfile build_profile(const Scene& scene, int location, const SubcarrierGrid& grid) {
    if (location < 0 || static_cast<std::size_t>(location) > scene.spots.size())
        throw InvalidInput("location " + std::to_string(location) + " out of range [0.." +
                           std::to_string(scene.spots.size()) + "]");

    // Near-cancellation profiles would blow up the zero-forcing step, so
    // nudge the geometry by 1 cm until the response is invertible.
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vec2 person;
        const Vec2* pp = nullptr;
        Scene adjusted = scene;
        if (location > 0) {
            person = scene.spots[static_cast<std::size_t>(location) - 1];
            person.x += 0.01 * attempt * std::cos(2.399963 * attempt);
            person.y += 0.01 * attempt * std::sin(2.399963 * attempt);
            pp = &person;
        } else if (attempt > 0) {
            adjusted.rx.x += 0.01 * attempt * std::cos(2.399963 * attempt);
            adjusted.rx.y += 0.01 * attempt * std::sin(2.399963 * attempt);
        }
        MultipathProfile prof = profile_for_geometry(adjusted, pp);
        const std::vector<cx> h = prof.response(grid);
        double lo = std::abs(h[0]), hi = std::abs(h[0]);
        for (const cx& v : h) {
            lo = std::min(lo, std::abs(v));
            hi = std::max(hi, std::abs(v));
        }
        if (lo >= 1e-6 * hi && hi > 0.0) return prof;
    }
    throw InvalidInput("build_profile: could not find an invertible geometry for location " +
                       std::to_string(location));
}

Packet apply_channel(const SubcarrierGrid& grid, const FrameLayout& layout,
                     const MultipathProfile& profile, const RfoModel& rfo, double initial_phase,
                     const CMat& tx_df, double snr_db, std::uint16_t label, RngStream& rng) {
    const std::size_t k = grid.num_subcarriers();
    if (tx_df.rows != k || tx_df.cols != layout.n_df)
        throw InvalidInput("apply_channel: payload shape mismatch");

    const std::vector<cx> h = profile.response(grid);
    const std::size_t n_total = layout.n_ltf + layout.n_df;

    std::vector<double> trajectory(n_total);
    for (std::size_t n = 0; n < n_total; ++n) trajectory[n] = rfo.phase_at(initial_phase, n);

    // Mean transmit-side signal power over the whole frame sets the noise
    // variance; a +inf SNR disables noise entirely.
    double sig_power = 0.0;
    for (std::size_t row = 0; row < k; ++row) {
        const double hp = std::norm(h[row]);
        sig_power += hp * layout.n_ltf;  // |ltf_ref| = 1
        for (std::size_t n = 0; n < layout.n_df; ++n) sig_power += hp * std::norm(tx_df.at(row, n));
    }
    sig_power /= static_cast<double>(k * n_total);
    const bool noiseless = std::isinf(snr_db);
    const double noise_var = noiseless ? 0.0 : sig_power / std::pow(10.0, snr_db / 10.0);
    const double noise_scale = std::sqrt(noise_var / 2.0);

    Packet pkt;
    pkt.label = label;
    pkt.ltf_rx = CMat(k, layout.n_ltf);
    pkt.df_rx = CMat(k, layout.n_df);

    for (std::size_t n = 0; n < layout.n_ltf; ++n) {
        const cx rot = std::polar(1.0, -trajectory[n]);
        for (std::size_t row = 0; row < k; ++row) {
            cx y = rot * h[row] * layout.ltf_ref[row];
            if (!noiseless) y += cx(rng.gaussian() * noise_scale, rng.gaussian() * noise_scale);
            pkt.ltf_rx.at(row, n) = y;
        }
    }
    for (std::size_t n = 0; n < layout.n_df; ++n) {
        const cx rot = std::polar(1.0, -trajectory[layout.n_ltf + n]);
        for (std::size_t row = 0; row < k; ++row) {
            cx y = rot * h[row] * tx_df.at(row, n);
            if (!noiseless) y += cx(rng.gaussian() * noise_scale, rng.gaussian() * noise_scale);
            pkt.df_rx.at(row, n) = y;
        }
    }

    PacketMeta meta;
    meta.label = label;
    meta.snr_db = snr_db;
    meta.true_csi = h;
    meta.rfo_trajectory = trajectory;
    meta.tx_df = tx_df;
    pkt.meta = std::move(meta);
    return pkt;
}

}  // namespace evs
