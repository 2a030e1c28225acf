#include "core/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/errors.hpp"

namespace evs {

KnnResult knn_predict(const FeatureSet& train, const FeatureSet& test, std::size_t k) {
    if (train.size() == 0) throw InvalidInput("knn: empty train set");
    if (k < 1 || k > train.size())
        throw InvalidInput("knn: k must be in [1, train size]");
    if (train.dim != test.dim) throw InvalidInput("knn: dimension mismatch");
    if (train.kind != test.kind) throw InvalidInput("knn: feature kind mismatch");

    KnnResult out;
    out.labels.resize(test.size());
    std::size_t correct = 0;

    std::vector<std::pair<double, std::size_t>> dist(train.size());
    for (std::size_t q = 0; q < test.size(); ++q) {
        const double* tq = test.row(q);
        for (std::size_t i = 0; i < train.size(); ++i) {
            const double* tr = train.row(i);
            double d = 0.0;
            for (std::size_t c = 0; c < train.dim; ++c) {
                const double diff = tq[c] - tr[c];
                d += diff * diff;
            }
            dist[i] = {d, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

        std::map<std::uint16_t, std::size_t> votes;
        for (std::size_t i = 0; i < k; ++i) ++votes[train.labels[dist[i].second]];
        std::uint16_t best_label = 0;
        std::size_t best_count = 0;
        for (const auto& [label, count] : votes) {
            if (count > best_count) {  // map iterates labels ascending: ties keep the smaller
                best_count = count;
                best_label = label;
            }
        }
        out.labels[q] = best_label;
        if (best_label == test.labels[q]) ++correct;
    }
    out.accuracy = test.size() ? static_cast<double>(correct) / static_cast<double>(test.size()) : 0.0;
    return out;
}

}  // namespace evs
