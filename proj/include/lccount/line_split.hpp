#pragma once

// Line split: for each nearest-neighbour annotation pair inside a multi-point
// blob, pick the perpendicular segment with the highest mean background
// probability.

#include <cmath>
#include <iostream>
#include <set>
#include <utility>
#include <vector>

#include "lccount/blobs.hpp"
#include "lccount/grid.hpp"
#include "lccount/instrumentation.hpp"
#include "lccount/watershed.hpp"

namespace lccount {

struct PointPair {
    Point first;
    Point second;

    friend bool operator==(const PointPair&, const PointPair&) = default;
};

using PointPairing = std::vector<PointPair>;

/// Pairs every point with its Euclidean-nearest other point (distance ties go
/// to the lexicographically smallest (row, col) partner) and drops unordered
/// duplicates. Pairs are listed in order of first appearance.
inline PointPairing pair_points(const std::vector<Point>& points) {
    if (points.size() < 2) throw InvalidInput("pair_points needs at least two points");
    PointPairing out;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::size_t best = i;
        long best_d2 = 0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            const long dr = points[j].row - points[i].row;
            const long dc = points[j].col - points[i].col;
            const long d2 = dr * dr + dc * dc;
            const bool better =
                best == i || d2 < best_d2 ||
                (d2 == best_d2 && std::pair(points[j].row, points[j].col) <
                                      std::pair(points[best].row, points[best].col));
            if (better) {
                best = j;
                best_d2 = d2;
            }
        }
        const auto key = std::minmax(i, best);
        if (seen.insert(key).second) out.push_back({points[i], points[best]});
    }
    return out;
}

struct PixelCoord {
    int row = 0;
    int col = 0;
    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// A rasterised straight segment clipped to one blob, with its mean
/// background probability.
struct SegmentCandidate {
    std::vector<PixelCoord> pixels;
    double score = 0.0;
};

namespace detail {

// Nearest integer to num / den (den > 0), halves rounded away from zero.
inline int round_ratio(long num, long den) {
    return static_cast<int>(num >= 0 ? (2 * num + den) / (2 * den) : -((-2 * num + den) / (2 * den)));
}

}  // namespace detail

/// All perpendicular candidates for one pair, in enumeration order: one per
/// integer step strictly between the two points (DDA along the major axis),
/// skipping anchors that fall outside the blob. Each segment grows from its
/// anchor in both perpendicular directions until it leaves the blob.
inline std::vector<SegmentCandidate> line_split_candidates(const ProbMap& s,
                                                           const LabelGrid& labels, int blob_id,
                                                           const PointPair& pair) {
    std::vector<SegmentCandidate> out;
    const long dr = pair.second.row - pair.first.row;
    const long dc = pair.second.col - pair.first.col;
    const long steps = std::max(std::abs(dr), std::abs(dc));
    if (steps == 0) return out;

    const auto inside = [&](int r, int c) { return labels.contains(r, c) && labels(r, c) == blob_id; };
    // Positions are rationals with denominator `steps`; the perpendicular
    // direction is (-dc, dr) / steps.
    for (long k = 1; k < steps; ++k) {
        const long ar = pair.first.row * steps + k * dr;
        const long ac = pair.first.col * steps + k * dc;
        const int anchor_r = detail::round_ratio(ar, steps);
        const int anchor_c = detail::round_ratio(ac, steps);
        if (!inside(anchor_r, anchor_c)) continue;
        const long br = static_cast<long>(anchor_r) * steps;
        const long bc = static_cast<long>(anchor_c) * steps;

        std::vector<PixelCoord> negative;
        for (long t = 1;; ++t) {
            const int r = detail::round_ratio(br + t * dc, steps);
            const int c = detail::round_ratio(bc - t * dr, steps);
            if (!inside(r, c)) break;
            negative.push_back({r, c});
        }
        SegmentCandidate cand;
        cand.pixels.assign(negative.rbegin(), negative.rend());
        cand.pixels.push_back({anchor_r, anchor_c});
        for (long t = 1;; ++t) {
            const int r = detail::round_ratio(br - t * dc, steps);
            const int c = detail::round_ratio(bc + t * dr, steps);
            if (!inside(r, c)) break;
            cand.pixels.push_back({r, c});
        }
        double sum = 0.0;
        for (const PixelCoord& p : cand.pixels) sum += s(p.row, p.col, 0);
        cand.score = sum / static_cast<double>(cand.pixels.size());
        out.push_back(std::move(cand));
    }
    return out;
}

struct LineSplitSelection {
    int blob_id = 0;
    PointPair pair;
    SegmentCandidate best;
};

/// Best segment per (multi-point blob, pair). Ties keep the earliest
/// candidate. Pairs of identical points and pairs without any in-blob anchor
/// contribute nothing.
inline std::vector<LineSplitSelection> line_split_selections(const ProbMap& s,
                                                             const BlobLabeling& blobs) {
    std::vector<LineSplitSelection> out;
    for (int id : blobs.multi_ids()) {
        for (const PointPair& pair : pair_points(blobs.blob(id).points)) {
            if (pair.first.row == pair.second.row && pair.first.col == pair.second.col) {
                std::cerr << "warning: line split skipped degenerate pair in blob " << id << "\n";
                continue;
            }
            auto candidates = line_split_candidates(s, blobs.labels(), id, pair);
            if (candidates.empty()) continue;
            std::size_t best = 0;
            for (std::size_t i = 1; i < candidates.size(); ++i)
                if (candidates[i].score > candidates[best].score) best = i;
            out.push_back({id, pair, std::move(candidates[best])});
        }
    }
    return out;
}

/// Union of the best segments, each pixel weighted by its blob's annotation
/// tally. `blobs` must come from foreground_mask(s) with points assigned.
inline SplitBoundary line_split(const ProbMap& s, const BlobLabeling& blobs) {
    ++instrumentation::split_calls;
    if (!blobs.labels().same_shape(s.height(), s.width()))
        throw InvalidInput("line_split inputs have mismatched dimensions");
    SplitBoundary boundary(s.height(), s.width());
    for (const LineSplitSelection& sel : line_split_selections(s, blobs)) {
        const int alpha = static_cast<int>(blobs.blob(sel.blob_id).points.size());
        for (const PixelCoord& p : sel.best.pixels) boundary.add(p.row, p.col, alpha);
    }
    return boundary;
}

}  // namespace lccount
