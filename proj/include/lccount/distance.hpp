#pragma once

// Exact Euclidean distance transform (lower envelope of parabolas, applied
// separably along columns then rows).

#include <cmath>
#include <limits>
#include <vector>

#include "lccount/grid.hpp"

namespace lccount {

namespace detail {

// One-dimensional squared distance transform of a sampled function `f`
// (values may be +inf). Writes into `out`.
inline void squared_distance_1d(const std::vector<double>& f, std::vector<double>& out,
                                std::vector<int>& vertex, std::vector<double>& boundary) {
    const int n = static_cast<int>(f.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    out.assign(static_cast<std::size_t>(n), inf);
    vertex.assign(static_cast<std::size_t>(n), 0);
    boundary.assign(static_cast<std::size_t>(n) + 1, 0.0);

    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        if (k < 0) {
            k = 0;
            vertex[0] = q;
            boundary[0] = -inf;
            boundary[1] = inf;
            continue;
        }
        const auto intersect = [&](int v) {
            return ((f[q] + double(q) * q) - (f[v] + double(v) * v)) / (2.0 * (q - v));
        };
        double s = intersect(vertex[k]);
        // boundary[0] is -inf, so this stops at k == 0.
        while (s <= boundary[k]) s = intersect(vertex[--k]);
        ++k;
        vertex[k] = q;
        boundary[k] = s;
        boundary[k + 1] = inf;
    }
    if (k < 0) return;
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (boundary[j + 1] < q) ++j;
        const double d = q - vertex[j];
        out[q] = d * d + f[vertex[j]];
    }
}

}  // namespace detail

/// Euclidean distance from every true pixel to the nearest false pixel; 0 on
/// false pixels. The image border does not count as background: when the mask
/// has no false pixel at all, every distance is the sentinel H + W.
inline Grid<double> distance_transform(const BinaryMask& mask) {
    const int h = mask.height();
    const int w = mask.width();
    const double cap = static_cast<double>(h + w);
    constexpr double inf = std::numeric_limits<double>::infinity();
    Grid<double> sq(h, w, inf);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (!mask[i]) sq[i] = 0.0;

    std::vector<double> f, out, boundary;
    std::vector<int> vertex;
    f.resize(static_cast<std::size_t>(h));
    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) f[r] = sq(r, c);
        detail::squared_distance_1d(f, out, vertex, boundary);
        for (int r = 0; r < h; ++r) sq(r, c) = out[r];
    }
    f.resize(static_cast<std::size_t>(w));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) f[c] = sq(r, c);
        detail::squared_distance_1d(f, out, vertex, boundary);
        for (int c = 0; c < w; ++c) sq(r, c) = out[c];
    }

    Grid<double> dist(h, w, 0.0);
    for (std::size_t i = 0; i < sq.size(); ++i)
        dist[i] = sq[i] == inf ? cap : std::min(std::sqrt(sq[i]), cap);
    return dist;
}

}  // namespace lccount
