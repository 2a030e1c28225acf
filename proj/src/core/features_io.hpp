#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/evs.hpp"

namespace evs {

/// In-memory feature table: one row per packet, constant dimension, one
/// kind for the whole set.
struct FeatureSet {
    FeatureKind kind = FeatureKind::kCsiAmp;
    std::size_t dim = 0;
    std::vector<std::uint16_t> labels;
    std::vector<double> values;  // row-major, labels.size() x dim

    std::size_t size() const { return labels.size(); }
    const double* row(std::size_t i) const { return values.data() + i * dim; }

    void append(const FeatureVector& fv);
};

/// CSV with header "label,kind,f1..fK"; 12 significant digits per value.
/// Written atomically (temp file + rename).
void write_features(const std::string& path, const FeatureSet& set);

FeatureSet read_features(const std::string& path);

}  // namespace evs
