#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lccount/grid.hpp"
#include "oracles.hpp"

using namespace lccount;

namespace {

LogitMap logits_from(int h, int w, int classes, std::vector<double> values) {
    Volume<double> v(h, w, classes);
    std::copy(values.begin(), values.end(), v.values().begin());
    return LogitMap(std::move(v));
}

}  // namespace

TEST(Softmax, ZeroLogitsAreUniform) {
    const ProbMap s = softmax(logits_from(2, 3, 2, std::vector<double>(12, 0.0)));
    for (double v : s.values().values()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Softmax, LogThreeGivesQuarterAndThreeQuarters) {
    const ProbMap s = softmax(logits_from(1, 1, 2, {0.0, std::log(3.0)}));
    EXPECT_NEAR(s(0, 0, 0), 0.25, 1e-15);
    EXPECT_NEAR(s(0, 0, 1), 0.75, 1e-15);
}

TEST(Softmax, ShiftInvariantPerPixel) {
    const ProbMap a = softmax(logits_from(1, 2, 3, {0.3, -1.2, 2.0, 5.0, 5.5, 4.0}));
    const ProbMap b = softmax(logits_from(1, 2, 3, {0.3 + 7.0, -1.2 + 7.0, 2.0 + 7.0, 5.0, 5.5, 4.0}));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(a(0, 0, k), b(0, 0, k), 1e-14);
}

TEST(Softmax, HandlesLargeLogitsWithoutOverflow) {
    const ProbMap s = softmax(logits_from(1, 1, 2, {1000.0, 0.0}));
    EXPECT_DOUBLE_EQ(s(0, 0, 0), 1.0);
    EXPECT_EQ(s(0, 0, 1), 0.0);
}

TEST(Softmax, RejectsNonFiniteAndSingleClass) {
    EXPECT_THROW(logits_from(1, 1, 2, {0.0, std::numeric_limits<double>::quiet_NaN()}), InvalidInput);
    EXPECT_THROW(logits_from(1, 1, 2, {std::numeric_limits<double>::infinity(), 0.0}), InvalidInput);
    EXPECT_THROW(logits_from(1, 1, 1, {0.0}), InvalidInput);
}

TEST(Softmax, RowsSumToOneOnRandomInputs) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const ProbMap s = softmax(oracle::random_logits(rng, 5, 4, 2 + trial % 4, 50.0));
        for (int p = 0; p < s.pixels(); ++p) {
            double sum = 0.0;
            for (double v : s.row_of(p)) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
                sum += v;
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(ProbMap, RejectsBadRows) {
    EXPECT_THROW(oracle::probmap_from(1, 1, 2, {0.6, 0.6}), InvalidInput);
    EXPECT_THROW(oracle::probmap_from(1, 1, 2, {-0.1, 1.1}), InvalidInput);
    EXPECT_NO_THROW(oracle::probmap_from(1, 1, 2, {0.3, 0.7}));
}

TEST(ForegroundMask, ArgmaxWithTiesToBackground) {
    const ProbMap s = oracle::probmap_from(1, 3, 2, {0.7, 0.3, 0.2, 0.8, 0.5, 0.5});
    const BinaryMask m = foreground_mask(s);
    EXPECT_EQ(m(0, 0), 0);
    EXPECT_EQ(m(0, 1), 1);
    EXPECT_EQ(m(0, 2), 0);
}

TEST(ArgmaxClass, Examples) {
    const ProbMap s = oracle::probmap_from(1, 2, 3, {0.1, 0.6, 0.3, 1.0 / 3, 1.0 / 3, 1.0 / 3});
    const Grid<int> a = argmax_class(s);
    EXPECT_EQ(a(0, 0), 1);
    EXPECT_EQ(a(0, 1), 0);
}

TEST(ArgmaxClass, OneHotIsIdentity) {
    const ProbMap s = oracle::probmap_from(1, 4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
    const Grid<int> a = argmax_class(s);
    for (int c = 0; c < 4; ++c) EXPECT_EQ(a(0, c), c);
}

TEST(ArgmaxClass, ForegroundMaskAgreesOnRandomMaps) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const ProbMap s = softmax(oracle::random_logits(rng, 6, 7, 3, 3.0));
        const Grid<int> a = argmax_class(s);
        const BinaryMask m = foreground_mask(s);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(m[i] != 0, a[i] > 0);
            const int p = static_cast<int>(i);
            for (int k = 0; k < s.classes(); ++k) EXPECT_LE(s.at(p, k), s.at(p, a[i]));
        }
    }
}

TEST(PresentClasses, Examples) {
    const PointAnnotations t(4, 4, {{0, 0, 1}, {1, 1, 1}, {2, 2, 3}});
    const ClassPartition p = present_classes(t, 4);
    EXPECT_EQ(p.present, (std::vector<ClassId>{0, 1, 3}));
    EXPECT_EQ(p.absent, (std::vector<ClassId>{2}));

    const ClassPartition empty = present_classes(PointAnnotations(3, 3), 2);
    EXPECT_EQ(empty.present, (std::vector<ClassId>{0}));
    EXPECT_EQ(empty.absent, (std::vector<ClassId>{1}));

    const ClassPartition full = present_classes(PointAnnotations(3, 3, {{0, 0, 1}, {0, 1, 2}}), 3);
    EXPECT_TRUE(full.absent.empty());
}

TEST(PresentClasses, PartitionsClassRange) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const int classes = 2 + trial % 4;
        const PointAnnotations t = oracle::random_points(rng, 8, 8, classes, 6);
        const ClassPartition p = present_classes(t, classes);
        std::vector<ClassId> all = p.present;
        all.insert(all.end(), p.absent.begin(), p.absent.end());
        std::sort(all.begin(), all.end());
        ASSERT_EQ(static_cast<int>(all.size()), classes);
        for (int c = 0; c < classes; ++c) EXPECT_EQ(all[c], c);
        EXPECT_EQ(p.present.front(), 0);
    }
}

TEST(PresentClasses, RejectsOutOfRangeClass) {
    EXPECT_THROW(present_classes(PointAnnotations(2, 2, {{0, 0, 2}}), 2), InvalidInput);
    EXPECT_THROW(present_classes(PointAnnotations(2, 2), 1), InvalidInput);
}

TEST(PointAnnotations, ValidatesPoints) {
    EXPECT_THROW(PointAnnotations(4, 4, {{-1, 0, 1}}), InvalidInput);
    EXPECT_THROW(PointAnnotations(4, 4, {{0, 4, 1}}), InvalidInput);
    EXPECT_THROW(PointAnnotations(4, 4, {{0, 0, 0}}), InvalidInput);
    EXPECT_THROW(PointAnnotations(4, 4, {{1, 1, 1}, {1, 1, 2}}), InvalidInput);
    EXPECT_NO_THROW(PointAnnotations(4, 4, {{3, 3, 1}, {0, 0, 2}}));
}
