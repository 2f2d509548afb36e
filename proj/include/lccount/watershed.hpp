#pragma once

// Seeded priority-flood watershed and the watershed split-boundary generator.

#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "lccount/blobs.hpp"
#include "lccount/distance.hpp"
#include "lccount/grid.hpp"
#include "lccount/instrumentation.hpp"

namespace lccount {

struct BoundaryPixel {
    int row = 0;
    int col = 0;
    int alpha = 1;  // annotation tally of the containing blob

    friend bool operator==(const BoundaryPixel&, const BoundaryPixel&) = default;
};

/// Pixels the split-level loss pushes toward background, with their weights.
/// Pixels are unique and kept in raster order.
class SplitBoundary {
public:
    SplitBoundary() = default;
    SplitBoundary(int height, int width) : weights_(height, width, 0) {}

    int height() const { return weights_.height(); }
    int width() const { return weights_.width(); }

    /// Adds a pixel; re-adding keeps the larger weight.
    void add(int row, int col, int alpha) {
        if (!weights_.contains(row, col)) throw InvalidInput("boundary pixel outside image");
        if (alpha < 1) throw InvalidInput("boundary weight must be >= 1");
        int& slot = weights_(row, col);
        slot = std::max(slot, alpha);
    }

    bool contains(int row, int col) const { return weights_.contains(row, col) && weights_(row, col) > 0; }
    int alpha_at(int row, int col) const { return weights_(row, col); }

    std::vector<BoundaryPixel> pixels() const {
        std::vector<BoundaryPixel> out;
        for (int r = 0; r < weights_.height(); ++r)
            for (int c = 0; c < weights_.width(); ++c)
                if (weights_(r, c) > 0) out.push_back({r, c, weights_(r, c)});
        return out;
    }
    std::size_t size() const {
        std::size_t n = 0;
        for (int v : weights_.values()) n += v > 0;
        return n;
    }
    bool empty() const { return size() == 0; }

    void merge(const SplitBoundary& other) {
        for (const BoundaryPixel& p : other.pixels()) add(p.row, p.col, p.alpha);
    }

private:
    Grid<int> weights_;
};

/// Priority-flood watershed of `-relief` from the given seeds, restricted to
/// `domain`. Seed k receives label k + 1; pixels outside the domain are 0.
/// Flooding uses 8-connectivity and pops in (-relief, insertion order).
/// Domain pixels the flood cannot reach (components without a seed) take the
/// label of the Euclidean-nearest seed, lowest seed index on ties.
inline LabelGrid seeded_watershed(const Grid<double>& relief, const std::vector<Point>& seeds,
                                  const BinaryMask& domain) {
    const int h = relief.height();
    const int w = relief.width();
    if (!domain.same_shape(h, w)) throw InvalidInput("watershed domain/relief shape mismatch");
    LabelGrid labels(h, w, 0);
    if (seeds.empty()) {
        if (std::any_of(domain.values().begin(), domain.values().end(), [](auto v) { return v != 0; }))
            throw InvalidInput("watershed needs at least one seed for a non-empty domain");
        return labels;
    }

    using Entry = std::tuple<double, std::uint64_t, int>;  // priority, sequence, pixel
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::uint64_t seq = 0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        const Point& s = seeds[k];
        if (!domain.contains(s.row, s.col) || !domain(s.row, s.col))
            throw InvalidInput("watershed seed (" + std::to_string(s.row) + ", " +
                               std::to_string(s.col) + ") lies outside the domain");
        if (labels(s.row, s.col) != 0) throw InvalidInput("duplicate watershed seed");
        if (!std::isfinite(relief(s.row, s.col))) throw InvalidInput("non-finite relief at seed");
        labels(s.row, s.col) = static_cast<int>(k) + 1;
        queue.emplace(-relief(s.row, s.col), seq++, static_cast<int>(labels.index(s.row, s.col)));
    }

    constexpr int kNeighbours[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                       {0, 1},   {1, -1}, {1, 0},  {1, 1}};
    while (!queue.empty()) {
        const auto [priority, order, pixel] = queue.top();
        queue.pop();
        const int r = pixel / w;
        const int c = pixel % w;
        const int label = labels(r, c);
        for (const auto& d : kNeighbours) {
            const int rr = r + d[0];
            const int cc = c + d[1];
            if (!domain.contains(rr, cc) || !domain(rr, cc) || labels(rr, cc) != 0) continue;
            if (!std::isfinite(relief(rr, cc))) throw InvalidInput("non-finite relief in domain");
            labels(rr, cc) = label;
            queue.emplace(-relief(rr, cc), seq++, static_cast<int>(labels.index(rr, cc)));
        }
    }

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!domain(r, c) || labels(r, c) != 0) continue;
            long best = std::numeric_limits<long>::max();
            for (std::size_t k = 0; k < seeds.size(); ++k) {
                const long dr = r - seeds[k].row;
                const long dc = c - seeds[k].col;
                const long d2 = dr * dr + dc * dc;
                if (d2 < best) {
                    best = d2;
                    labels(r, c) = static_cast<int>(k) + 1;
                }
            }
        }
    }
    return labels;
}

/// Pixels with a 4-neighbour carrying a different non-zero label.
inline BinaryMask ridge_pixels(const LabelGrid& labels) {
    BinaryMask out(labels.height(), labels.width(), 0);
    constexpr int kNeighbours[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (int r = 0; r < labels.height(); ++r) {
        for (int c = 0; c < labels.width(); ++c) {
            const int l = labels(r, c);
            if (l == 0) continue;
            for (const auto& d : kNeighbours) {
                const int rr = r + d[0];
                const int cc = c + d[1];
                if (!labels.contains(rr, cc)) continue;
                const int n = labels(rr, cc);
                if (n != 0 && n != l) {
                    out(r, c) = 1;
                    break;
                }
            }
        }
    }
    return out;
}

struct WatershedSplitOptions {
    bool global_pass = true;
    bool local_pass = true;
};

/// Split boundary from a global watershed (all annotations as seeds, whole
/// image) and a local watershed inside every blob holding two or more
/// annotations, both over the distance transform of the foreground mask.
/// `blobs` must come from `mask` with points already assigned.
inline SplitBoundary watershed_split(const BinaryMask& mask, const BlobLabeling& blobs,
                                     const PointAnnotations& t,
                                     WatershedSplitOptions options = {}) {
    ++instrumentation::split_calls;
    const int h = mask.height();
    const int w = mask.width();
    if (!blobs.labels().same_shape(h, w) || t.height() != h || t.width() != w)
        throw InvalidInput("watershed_split inputs have mismatched dimensions");
    SplitBoundary boundary(h, w);
    if (t.empty()) return boundary;

    const Grid<double> relief = distance_transform(mask);
    const auto alpha_at = [&](int r, int c) {
        const int id = blobs.label_at(r, c);
        if (id == 0) return 1;
        const int tally = static_cast<int>(blobs.blob(id).points.size());
        return tally >= 2 ? tally : 1;
    };
    const auto add_ridges = [&](const LabelGrid& labels) {
        const BinaryMask ridges = ridge_pixels(labels);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                if (ridges(r, c)) boundary.add(r, c, alpha_at(r, c));
    };

    if (options.global_pass) {
        const BinaryMask everywhere(h, w, 1);
        add_ridges(seeded_watershed(relief, t.points(), everywhere));
    }
    if (options.local_pass) {
        for (int id : blobs.multi_ids()) {
            BinaryMask domain(h, w, 0);
            for (std::size_t i = 0; i < domain.size(); ++i)
                domain[i] = blobs.labels()[i] == id ? 1 : 0;
            add_ridges(seeded_watershed(relief, blobs.blob(id).points, domain));
        }
    }
    return boundary;
}

}  // namespace lccount
