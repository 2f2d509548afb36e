#include <gtest/gtest.h>

#include <random>

#include "lccount/blobs.hpp"
#include "oracles.hpp"

using namespace lccount;

namespace {

BinaryMask mask_from(const std::vector<std::string>& rows) {
    BinaryMask m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), 0);
    for (int r = 0; r < m.height(); ++r)
        for (int c = 0; c < m.width(); ++c) m(r, c) = rows[r][c] == '#' ? 1 : 0;
    return m;
}

}  // namespace

TEST(ConnectedComponents, AllFalseHasNoBlobs) {
    const BlobLabeling b = connected_components(BinaryMask(5, 4, 0));
    EXPECT_EQ(b.count(), 0);
}

TEST(ConnectedComponents, DiagonalNeighboursJoin) {
    const BlobLabeling b = connected_components(mask_from({"#..", ".#.", "..."}));
    EXPECT_EQ(b.count(), 1);
    EXPECT_EQ(b.blob(1).pixel_count, 2);
}

TEST(ConnectedComponents, FalseRowSeparates) {
    const BlobLabeling b = connected_components(mask_from({"#", ".", "#"}));
    EXPECT_EQ(b.count(), 2);
}

TEST(ConnectedComponents, IdsDenseInRasterOrder) {
    const BlobLabeling b = connected_components(mask_from({"..#..#", "......", "#....#"}));
    ASSERT_EQ(b.count(), 4);
    EXPECT_EQ(b.label_at(0, 2), 1);
    EXPECT_EQ(b.label_at(0, 5), 2);
    EXPECT_EQ(b.label_at(2, 0), 3);
    EXPECT_EQ(b.label_at(2, 5), 4);
}

TEST(ConnectedComponents, UShapeMergesLateEquivalence) {
    const BlobLabeling b = connected_components(mask_from({"#...#", "#...#", "#####"}));
    EXPECT_EQ(b.count(), 1);
    EXPECT_EQ(b.blob(1).pixel_count, 9);
}

TEST(ConnectedComponents, MatchesFloodFillOnRandomMasks) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 12);
    std::uniform_real_distribution<double> density(0.1, 0.8);
    for (int trial = 0; trial < 1000; ++trial) {
        const BinaryMask m = oracle::random_mask(rng, dim(rng), dim(rng), density(rng));
        const BlobLabeling b = connected_components(m);
        const LabelGrid expected = oracle::flood_fill(m);
        ASSERT_TRUE(oracle::same_partition(b.labels(), expected)) << "trial " << trial;
        int pixels = 0;
        for (const Blob& blob : b.blobs()) pixels += blob.pixel_count;
        int on = 0;
        for (auto v : m.values()) on += v;
        EXPECT_EQ(pixels, on);
    }
}

TEST(AssignPoints, SingletonMultiAndFalsePositive) {
    const BinaryMask m = mask_from({"##...", "##..#", "....#"});
    const BlobLabeling blobs = connected_components(m);

    const BlobLabeling one = assign_points(blobs, PointAnnotations(3, 5, {{0, 0, 1}, {1, 4, 1}}));
    EXPECT_EQ(one.singleton_ids(), (std::vector<int>{1, 2}));
    EXPECT_TRUE(one.multi_ids().empty());
    EXPECT_TRUE(one.false_positive_ids().empty());

    const BlobLabeling three = assign_points(blobs, PointAnnotations(3, 5, {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}}));
    EXPECT_EQ(three.multi_ids(), (std::vector<int>{1}));
    EXPECT_EQ(three.blob(1).points.size(), 3u);
    EXPECT_EQ(three.false_positive_ids(), (std::vector<int>{2}));
}

TEST(AssignPoints, TracksUnmatchedAndClassFilter) {
    const BlobLabeling blobs = connected_components(mask_from({"#..", "...", "..#"}));
    const PointAnnotations t(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 2}});
    const BlobLabeling all = assign_points(blobs, t);
    EXPECT_EQ(all.unmatched_points().size(), 1u);
    EXPECT_EQ(all.blob(2).points.size(), 1u);

    const BlobLabeling only1 = assign_points(blobs, t, 1);
    EXPECT_EQ(only1.blob(1).points.size(), 1u);
    EXPECT_TRUE(only1.blob(2).points.empty());
}

TEST(AssignPoints, RejectsSizeMismatch) {
    const BlobLabeling blobs = connected_components(BinaryMask(3, 3, 1));
    EXPECT_THROW(assign_points(blobs, PointAnnotations(3, 4)), InvalidInput);
}

TEST(AssignPoints, TalliesSumToMatchedPoints) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const BinaryMask m = oracle::random_mask(rng, 9, 9, 0.4);
        const PointAnnotations t = oracle::random_points(rng, 9, 9, 2, 10);
        const BlobLabeling b = assign_points(connected_components(m), t);
        std::size_t matched = 0;
        for (const Blob& blob : b.blobs()) {
            matched += blob.points.size();
            for (const Point& p : blob.points) EXPECT_EQ(b.label_at(p.row, p.col), blob.id);
        }
        EXPECT_EQ(matched + b.unmatched_points().size(), t.size());
        EXPECT_EQ(b.singleton_ids().size() + b.multi_ids().size() + b.false_positive_ids().size(),
                  static_cast<std::size_t>(b.count()));
    }
}

TEST(BlobCenters, SinglePixelSquareAndLShape) {
    const auto single = blob_centers(connected_components(mask_from({"...", ".#.", "..."})));
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].row, 1);
    EXPECT_EQ(single[0].col, 1);

    const auto square = blob_centers(connected_components(mask_from({"##.", "##.", "..."})));
    EXPECT_EQ(square[0].row, 1);
    EXPECT_EQ(square[0].col, 1);

    // L: column 0 rows 0-4 plus row 4 cols 1-4; centroid (2.89, 1.11) -> (3, 1), off the blob.
    const BinaryMask l = mask_from({"#....", "#....", "#....", "#....", "#####"});
    const BlobLabeling lb = connected_components(l);
    const auto lc = blob_centers(lb);
    EXPECT_EQ(lc[0].row, 3);
    EXPECT_EQ(lc[0].col, 1);
    EXPECT_EQ(lb.label_at(3, 1), 0);
}
