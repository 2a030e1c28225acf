#include "core/dataset.hpp"

#include <numbers>

#include "core/capture.hpp"
#include "core/errors.hpp"

namespace evs {

Packet simulate_packet(const SubcarrierGrid& grid, const FrameLayout& layout,
                       const MultipathProfile& profile, const GenParams& params, bool test_split,
                       std::uint16_t label, std::size_t index) {
    RngStream rng = RngStream::derive(params.seed, {test_split ? 2ULL : 1ULL, label, index});
    const double phi0 = rng.uniform() * 2.0 * std::numbers::pi;
    const CMat tx = random_df_payload(layout, grid, params.order, rng);
    RfoModel rfo;
    rfo.cfo_hz = params.cfo_hz;
    return apply_channel(grid, layout, profile, rfo, phi0, tx, params.snr_db, label, rng);
}

GenSummary generate_dataset(const Scene& scene, const SubcarrierGrid& grid,
                            const FrameLayout& layout, const GenParams& params,
                            const std::string& out_stem) {
    if (params.train_per_label < 1 || params.test_per_label < 1)
        throw InvalidInput("generate_dataset: per-label counts must be >= 1");
    scene.validate();
    grid.validate();
    layout.validate(grid);

    const std::size_t labels = scene.num_labels();
    std::vector<MultipathProfile> profiles(labels);
    for (std::size_t l = 0; l < labels; ++l)
        profiles[l] = build_profile(scene, static_cast<int>(l), grid);

    GenSummary summary;
    summary.labels = labels;
    summary.train_path = out_stem + ".train.evsc";
    summary.test_path = out_stem + ".test.evsc";

    const auto write_split = [&](const std::string& path, std::size_t per_label, bool test_split) {
        CaptureHeader h;
        h.k = static_cast<std::uint16_t>(grid.num_subcarriers());
        h.n_ltf = static_cast<std::uint16_t>(layout.n_ltf);
        h.n_df = static_cast<std::uint16_t>(layout.n_df);
        h.packet_count = static_cast<std::uint32_t>(labels * per_label);
        h.flags = CaptureHeader::kFlagMeta;
        CaptureWriter w(path, h);
        for (std::size_t l = 0; l < labels; ++l) {
            for (std::size_t i = 0; i < per_label; ++i) {
                w.append(simulate_packet(grid, layout, profiles[l], params, test_split,
                                         static_cast<std::uint16_t>(l), i));
            }
        }
        w.close();
        return labels * per_label;
    };

    summary.train_packets = write_split(summary.train_path, params.train_per_label, false);
    summary.test_packets = write_split(summary.test_path, params.test_per_label, true);
    return summary;
}

}  // namespace evs
