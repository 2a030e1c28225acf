#pragma once

#include <cstddef>
#include <vector>

#include "core/types.hpp"

namespace evs {

/// Unit-average-energy constellation of a supported modulation order.
/// Point order follows the Gray-coded symbol index, fixed for
/// reproducibility; hard decision only depends on geometry.
struct Constellation {
    int order = 2;
    std::vector<cx> points;

    /// Index of the nearest point (Euclidean); equal distances resolve to
    /// the smaller index.
    std::size_t nearest(const cx& z) const;

    /// Same decision computed per axis (square-QAM level quantization)
    /// instead of a full point scan. Agrees with nearest() everywhere,
    /// including exact ties.
    std::size_t quantize(const cx& z) const;
};

/// Canonical constellation for order in {2, 4, 16, 64}. Throws InvalidInput
/// otherwise. Normalization: 1, 1/sqrt(2), 1/sqrt(10), 1/sqrt(42).
Constellation make_constellation(int order);

}  // namespace evs
