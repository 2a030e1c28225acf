#include "core/constellation.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace evs {

namespace {

// Gray-coded amplitude levels, indexed by the per-axis bit group.
constexpr std::array<int, 2> kLevels2 = {-1, 1};
constexpr std::array<int, 4> kLevels4 = {-3, -1, 3, 1};          // bits 00,01,10,11
constexpr std::array<int, 8> kLevels8 = {-7, -5, -1, -3, 7, 5, 1, 3};  // bits 000..111

template <std::size_t N>
int level_for_bits(const std::array<int, N>& tab, unsigned bits) {
    return tab[bits];
}

// Per-axis decision: closest level wins, ties go to the smaller bit group,
// which keeps the combined index consistent with a full nearest-point scan.
template <std::size_t N>
unsigned quantize_axis(const std::array<int, N>& tab, double u, double scale) {
    unsigned best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (unsigned b = 0; b < N; ++b) {
        const double d = (u - tab[b] * scale) * (u - tab[b] * scale);
        if (d < best_d) {
            best_d = d;
            best = b;
        }
    }
    return best;
}

}  // namespace

std::size_t Constellation::nearest(const cx& z) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = std::norm(z - points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::size_t Constellation::quantize(const cx& z) const {
    switch (order) {
        case 2:
            return quantize_axis(kLevels2, z.real(), 1.0);
        case 4: {
            const double s = 1.0 / std::sqrt(2.0);
            return (quantize_axis(kLevels2, z.real(), s) << 1) |
                   quantize_axis(kLevels2, z.imag(), s);
        }
        case 16: {
            const double s = 1.0 / std::sqrt(10.0);
            return (quantize_axis(kLevels4, z.real(), s) << 2) |
                   quantize_axis(kLevels4, z.imag(), s);
        }
        case 64: {
            const double s = 1.0 / std::sqrt(42.0);
            return (quantize_axis(kLevels8, z.real(), s) << 3) |
                   quantize_axis(kLevels8, z.imag(), s);
        }
        default:
            throw InvalidInput("unsupported modulation order " + std::to_string(order));
    }
}

Constellation make_constellation(int order) {
    Constellation c;
    c.order = order;
    switch (order) {
        case 2:
            c.points = {cx(-1.0, 0.0), cx(1.0, 0.0)};
            break;
        case 4: {
            const double s = 1.0 / std::sqrt(2.0);
            c.points.resize(4);
            for (unsigned i = 0; i < 4; ++i) {
                const int li = level_for_bits(kLevels2, (i >> 1) & 1u);
                const int lq = level_for_bits(kLevels2, i & 1u);
                c.points[i] = cx(li * s, lq * s);
            }
            break;
        }
        case 16: {
            const double s = 1.0 / std::sqrt(10.0);
            c.points.resize(16);
            for (unsigned i = 0; i < 16; ++i) {
                const int li = level_for_bits(kLevels4, (i >> 2) & 3u);
                const int lq = level_for_bits(kLevels4, i & 3u);
                c.points[i] = cx(li * s, lq * s);
            }
            break;
        }
        case 64: {
            const double s = 1.0 / std::sqrt(42.0);
            c.points.resize(64);
            for (unsigned i = 0; i < 64; ++i) {
                const int li = level_for_bits(kLevels8, (i >> 3) & 7u);
                const int lq = level_for_bits(kLevels8, i & 7u);
                c.points[i] = cx(li * s, lq * s);
            }
            break;
        }
        default:
            throw InvalidInput("unsupported modulation order " + std::to_string(order) +
                               " (expected 2, 4, 16 or 64)");
    }
    return c;
}

}  // namespace evs
