#pragma once

#include <cstdint>
#include <vector>

#include "core/features_io.hpp"

namespace evs {

/// Brute-force k-nearest-neighbor vote. Neighbors order by (distance, train
/// index); vote ties resolve toward the smaller label. Returns predicted
/// labels for every test row plus accuracy against the test labels.
struct KnnResult {
    std::vector<std::uint16_t> labels;
    double accuracy = 0.0;
};

KnnResult knn_predict(const FeatureSet& train, const FeatureSet& test, std::size_t k);

}  // namespace evs
