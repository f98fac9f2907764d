#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "curveclock/contour.hpp"
#include "curveclock/error.hpp"
#include "curveclock/parallel.hpp"

namespace curveclock {

/// Contours with integer class labels. For metric work all contours must
/// share the same sample count (the canonical parameterization guarantees
/// index-to-index correspondence; no alignment search happens anywhere).
struct LabeledDataset {
    std::vector<Contour> contours;
    std::vector<int> labels;
    int class_count = 0;

    std::size_t size() const { return contours.size(); }

    void validate() const {
        if (contours.size() != labels.size())
            throw ValidationError("LabeledDataset: contour/label count mismatch");
        if (contours.empty()) throw ValidationError("LabeledDataset: empty dataset");
        const std::size_t n = contours.front().size();
        for (const Contour& c : contours)
            if (c.size() != n)
                throw ValidationError("LabeledDataset: contours must share the same sample count");
        for (int l : labels)
            if (l < 0 || l >= class_count)
                throw ValidationError("LabeledDataset: label out of range [0, K)");
    }

    std::vector<std::size_t> members_of(int k) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == k) idx.push_back(i);
        return idx;
    }
};

/// Discrete L2(S^1) distance with dt = 1/N between two equally sampled
/// contours: sqrt( (1/N) * sum_i |a_i - b_i|^2 ).
inline double l2_distance(const Contour& a, const Contour& b) {
    if (a.size() != b.size())
        throw ValidationError("l2_distance: contours have different sample counts");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += norm2(a[i] - b[i]);
    return std::sqrt(sum / static_cast<double>(a.size()));
}

/// Symmetric pairwise distances, zero diagonal.
struct DistanceMatrix {
    std::size_t size = 0;
    std::vector<double> values; // row-major, size*size

    double operator()(std::size_t i, std::size_t j) const { return values[i * size + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * size + j]; }
};

inline DistanceMatrix distance_matrix(const LabeledDataset& d, unsigned threads = 0) {
    d.validate();
    const std::size_t m = d.size();
    DistanceMatrix out;
    out.size = m;
    out.values.assign(m * m, 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v = l2_distance(d.contours[i], d.contours[j]);
        out.at(i, j) = v;
        out.at(j, i) = v;
    });
    return out;
}

/// Vertex-wise mean of the class members: the average shape. Treated as a raw
/// point sequence (it is only ever used inside distances, never re-normalized).
inline Contour class_centroid(const LabeledDataset& d, int k) {
    const std::vector<std::size_t> members = d.members_of(k);
    if (members.empty())
        throw ValidationError("class_centroid: class " + std::to_string(k) + " is empty");
    Contour mean;
    mean.points.assign(d.contours[members[0]].size(), Vec2{0, 0});
    for (std::size_t idx : members)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += d.contours[idx][i];
    const double inv = 1.0 / static_cast<double>(members.size());
    for (Vec2& p : mean.points) p *= inv;
    return mean;
}

/// Minimum inter-class centroid distance over the maximum intra-class
/// diameter. Requires K >= 2 and at least two members per class; an all-zero
/// intra diameter signals degenerate clustering rather than returning +inf.
inline double dunn_index(const LabeledDataset& d, unsigned threads = 0) {
    d.validate();
    if (d.class_count < 2)
        throw ValidationError("dunn_index: need at least two classes");

    std::vector<Contour> centroids;
    centroids.reserve(static_cast<std::size_t>(d.class_count));
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(d.class_count));
    for (int k = 0; k < d.class_count; ++k) {
        members[static_cast<std::size_t>(k)] = d.members_of(k);
        if (members[static_cast<std::size_t>(k)].size() < 2)
            throw ValidationError("dunn_index: class " + std::to_string(k) +
                                  " has fewer than two members (intra diameter undefined)");
        centroids.push_back(class_centroid(d, k));
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < members.size(); ++k)
        for (std::size_t i = 0; i < members[k].size(); ++i)
            for (std::size_t j = i + 1; j < members[k].size(); ++j)
                pairs.emplace_back(members[k][i], members[k][j]);
    std::vector<double> pair_dist(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        pair_dist[p] = l2_distance(d.contours[pairs[p].first], d.contours[pairs[p].second]);
    });
    double max_intra = 0.0;
    for (double v : pair_dist) max_intra = std::max(max_intra, v);
    if (max_intra <= 0.0)
        throw NumericError("dunn_index: degenerate clustering (zero intra-class diameter)");

    double min_inter = std::numeric_limits<double>::infinity();
    for (std::size_t k1 = 0; k1 < centroids.size(); ++k1)
        for (std::size_t k2 = k1 + 1; k2 < centroids.size(); ++k2)
            min_inter = std::min(min_inter, l2_distance(centroids[k1], centroids[k2]));

    return min_inter / max_intra;
}

} // namespace curveclock
