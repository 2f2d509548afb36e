#include <gtest/gtest.h>

#include <random>

#include "lccount/line_split.hpp"
#include "oracles.hpp"

using namespace lccount;

namespace {

// 7x13 image with a 5x11 rectangular blob at rows 1-5, cols 1-11 and
// annotations at (3, 2) and (3, 10).
struct RectangleCase {
    BinaryMask mask{7, 13, 0};
    PointAnnotations points;
    BlobLabeling blobs;

    RectangleCase() {
        for (int r = 1; r <= 5; ++r)
            for (int c = 1; c <= 11; ++c) mask(r, c) = 1;
        points = PointAnnotations(7, 13, {{3, 2, 1}, {3, 10, 1}});
        blobs = assign_points(connected_components(mask), points);
    }
};

// A vertical segment listed bottom to top: for a left-to-right pair the
// negative perpendicular side points down and comes first.
std::vector<PixelCoord> column(int col, int r0, int r1) {
    std::vector<PixelCoord> out;
    for (int r = r1; r >= r0; --r) out.push_back({r, col});
    return out;
}

}  // namespace

TEST(PairPoints, TwoPointsOnePair) {
    const PointPairing p = pair_points({{0, 0, 1}, {3, 4, 1}});
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], (PointPair{{0, 0, 1}, {3, 4, 1}}));
}

TEST(PairPoints, CollinearPointsDeduplicate) {
    const Point a{0, 0, 1}, b{0, 2, 1}, c{0, 10, 1};
    EXPECT_EQ(pair_points({a, b, c}), (PointPairing{{a, b}, {c, b}}));
}

TEST(PairPoints, SquareCornersPairAlongSides) {
    const std::vector<Point> corners{{0, 0, 1}, {0, 4, 1}, {4, 0, 1}, {4, 4, 1}};
    const PointPairing p = pair_points(corners);
    EXPECT_LE(p.size(), 4u);
    for (const PointPair& pair : p) {
        const bool side = pair.first.row == pair.second.row || pair.first.col == pair.second.col;
        EXPECT_TRUE(side);
    }
    // ties go to the lexicographically smallest partner
    EXPECT_EQ(p, (PointPairing{{corners[0], corners[1]}, {corners[2], corners[0]}, {corners[3], corners[1]}}));
}

TEST(PairPoints, EveryPointPairsWithANearestNeighbour) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const PointAnnotations t = oracle::random_points(rng, 12, 12, 2, 8);
        if (t.size() < 2) continue;
        const PointPairing pairs = pair_points(t.points());
        for (const Point& p : t.points()) {
            long best = -1;
            for (const Point& q : t.points()) {
                if (q == p) continue;
                const long d = long(p.row - q.row) * (p.row - q.row) + long(p.col - q.col) * (p.col - q.col);
                if (best < 0 || d < best) best = d;
            }
            bool found = false;
            for (const PointPair& pair : pairs) {
                if (!(pair.first == p || pair.second == p)) continue;
                const Point& q = pair.first == p ? pair.second : pair.first;
                const long d = long(p.row - q.row) * (p.row - q.row) + long(p.col - q.col) * (p.col - q.col);
                found |= d == best;
            }
            EXPECT_TRUE(found);
        }
        for (std::size_t i = 0; i < pairs.size(); ++i)
            for (std::size_t j = i + 1; j < pairs.size(); ++j)
                EXPECT_FALSE((pairs[i].first == pairs[j].first && pairs[i].second == pairs[j].second) ||
                             (pairs[i].first == pairs[j].second && pairs[i].second == pairs[j].first));
    }
}

TEST(PairPoints, RejectsFewerThanTwo) {
    EXPECT_THROW(pair_points({}), InvalidInput);
    EXPECT_THROW(pair_points({{1, 1, 1}}), InvalidInput);
}

TEST(LineSplit, PicksTheBackgroundValley) {
    RectangleCase rc;
    Grid<double> bg(7, 13, 0.1);
    for (int r = 1; r <= 5; ++r) bg(r, 6) = 0.9;
    const ProbMap s = oracle::background_map(bg);
    const auto sel = line_split_selections(s, rc.blobs);
    ASSERT_EQ(sel.size(), 1u);
    EXPECT_EQ(sel[0].best.pixels, column(6, 1, 5));
    EXPECT_NEAR(sel[0].best.score, 0.9, 1e-12);
}

TEST(LineSplit, UniformScoresKeepFirstCandidate) {
    RectangleCase rc;
    const ProbMap s = oracle::background_map(Grid<double>(7, 13, 0.3));
    const auto cands = line_split_candidates(s, rc.blobs.labels(), 1, {{3, 2, 1}, {3, 10, 1}});
    ASSERT_EQ(cands.size(), 7u);
    const auto sel = line_split_selections(s, rc.blobs);
    ASSERT_EQ(sel.size(), 1u);
    EXPECT_EQ(sel[0].best.pixels, column(3, 1, 5));
}

TEST(LineSplit, TwoPointBlobWeightsEqualTwo) {
    RectangleCase rc;
    const ProbMap s = oracle::background_map(Grid<double>(7, 13, 0.2));
    const SplitBoundary b = line_split(s, rc.blobs);
    ASSERT_FALSE(b.empty());
    for (const BoundaryPixel& p : b.pixels()) EXPECT_EQ(p.alpha, 2);
}

TEST(LineSplit, NoMultiBlobNoBoundary) {
    RectangleCase rc;
    const BlobLabeling single = assign_points(connected_components(rc.mask), PointAnnotations(7, 13, {{3, 2, 1}}));
    EXPECT_TRUE(line_split(oracle::background_map(Grid<double>(7, 13, 0.2)), single).empty());
}

TEST(LineSplit, DiagonalPairPerpendicularIsAntiDiagonal) {
    const BinaryMask mask(9, 9, 1);
    const BlobLabeling blobs = connected_components(mask);
    const ProbMap s = oracle::background_map(Grid<double>(9, 9, 0.25));
    const auto cands = line_split_candidates(s, blobs.labels(), 1, {{2, 2, 1}, {6, 6, 1}});
    ASSERT_EQ(cands.size(), 3u);
    // anchor (4, 4): the perpendicular runs from corner (8, 0) to corner (0, 8)
    const auto& mid = cands[1].pixels;
    ASSERT_EQ(mid.size(), 9u);
    EXPECT_EQ(mid.front(), (PixelCoord{8, 0}));
    EXPECT_EQ(mid[4], (PixelCoord{4, 4}));
    EXPECT_EQ(mid.back(), (PixelCoord{0, 8}));
}

TEST(LineSplit, BestScoreMatchesExhaustiveEnumeration) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 0.49);
    int checked = 0;
    for (int trial = 0; checked < 200 && trial < 5000; ++trial) {
        const BinaryMask mask = oracle::random_mask(rng, 12, 12, 0.75);
        const BlobLabeling raw = connected_components(mask);
        if (raw.count() == 0) continue;
        const PointAnnotations t = oracle::random_points(rng, 12, 12, 2, 10);
        const BlobLabeling blobs = assign_points(raw, t);
        if (blobs.multi_ids().empty()) continue;
        Grid<double> bg(12, 12, 0.9);
        for (std::size_t i = 0; i < bg.size(); ++i)
            if (mask[i]) bg[i] = u(rng);
        const ProbMap s = oracle::background_map(bg);

        const auto selections = line_split_selections(s, blobs);
        std::size_t expected = 0;
        for (int id : blobs.multi_ids())
            for (const PointPair& pair : pair_points(blobs.blob(id).points))
                expected += !oracle::line_candidates(blobs.labels(), id, pair.first, pair.second).empty();
        EXPECT_EQ(selections.size(), expected);
        for (const LineSplitSelection& sel : selections) {
            const auto cands = oracle::line_candidates(blobs.labels(), sel.blob_id, sel.pair.first, sel.pair.second);
            ASSERT_FALSE(cands.empty());
            double best = -1.0;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                const double score = oracle::mean_background(s, cands[i]);
                if (score > best) {
                    best = score;
                    arg = i;
                }
            }
            EXPECT_NEAR(sel.best.score, best, 1e-12);
            ASSERT_EQ(sel.best.pixels.size(), cands[arg].size());
            for (std::size_t i = 0; i < cands[arg].size(); ++i) {
                EXPECT_EQ(sel.best.pixels[i].row, cands[arg][i].first);
                EXPECT_EQ(sel.best.pixels[i].col, cands[arg][i].second);
            }
        }
        ++checked;
    }
    EXPECT_EQ(checked, 200);
}
