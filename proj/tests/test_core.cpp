#include <gtest/gtest.h>

#include "hsrq/errors.hpp"
#include "hsrq/reduce.hpp"
#include "support.hpp"

using namespace hsrq;

TEST(TileGrid, RangesConcatenateToTheWholeIndexSet) {
    for (std::size_t n = 1; n <= 40; ++n)
        for (std::size_t b = 1; b <= n; ++b) {
            const TileGrid g(n, b);
            std::size_t next = 0;
            for (std::size_t t = 0; t < g.count(); ++t) {
                EXPECT_EQ(g[t].begin, next);
                EXPECT_GT(g[t].size(), 0u);
                EXPECT_LE(g[t].size(), b);
                next = g[t].end;
            }
            EXPECT_EQ(next, n);
        }
}

TEST(TileGrid, RaggedLastTile) {
    const TileGrid g(10, 4);
    ASSERT_EQ(g.count(), 3u);
    EXPECT_EQ(g[2], (Range{8, 10}));
    EXPECT_EQ(g.owner(9), 2u);
    EXPECT_THROW(TileGrid(5, 0), ConfigError);
}

TEST(Interleave, RoundTripIsIdentity) {
    SplitMix64 rng(3);
    ComplexMatrix z(7, 3);
    for (auto& v : z.values()) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const RealMatrix packed = interleave(z);
    EXPECT_EQ(packed.cols(), 6u);
    EXPECT_TRUE(deinterleave(packed) == z);
    EXPECT_EQ(packed(2, 3), z(2, 1).imag());
}

TEST(Hessenberg, InfinityNormExamples) {
    RealMatrix one(1, 1);
    one(0, 0) = -3.0;
    EXPECT_EQ(HessenbergMatrix(one).infinity_norm(), 3.0);
    EXPECT_EQ(HessenbergMatrix(RealMatrix::identity(4)).infinity_norm(), 1.0);

    const HessenbergMatrix h2 = gen_h2(6);
    double best = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 6; ++j) row += std::abs(h2(i, j));
        best = std::max(best, row);
    }
    EXPECT_EQ(h2.infinity_norm(), best);
}

TEST(Hessenberg, RejectsEntriesBelowTheSubdiagonal) {
    RealMatrix a(3, 3, 1.0);
    EXPECT_THROW(HessenbergMatrix{a}, StructureError);
    const HessenbergMatrix h = HessenbergMatrix::from_upper_part(a);
    EXPECT_EQ(h(2, 0), 0.0);
    EXPECT_EQ(h(2, 1), 1.0);
    RealMatrix bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(HessenbergMatrix{bad}, StructureError);
    EXPECT_THROW(HessenbergMatrix{RealMatrix(2, 3)}, ConfigError);
}

TEST(Hessenberg, Unreducedness) {
    EXPECT_FALSE(HessenbergMatrix(RealMatrix::identity(3)).is_unreduced());
    const HessenbergMatrix h2 = gen_h2(6);
    EXPECT_TRUE(h2.is_unreduced());
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(h2(j + 1, j), -static_cast<double>(5 - j));
    EXPECT_TRUE(random_hessenberg(30, 1).is_unreduced());
}

TEST(ShiftBatch, PartitionsIntoBatchesWithRaggedLast) {
    const ShiftBatch s = ShiftBatch::real({1, 2, 3, 4, 5}, 2);
    EXPECT_EQ(s.batch_count(), 3u);
    EXPECT_EQ(s.batch(2), (Range{4, 5}));
    EXPECT_EQ(s.real_values(s.batch(1))[1], 4.0);
    EXPECT_THROW(ShiftBatch::real({std::numeric_limits<double>::infinity()}, 1), ConfigError);
    const ShiftBatch c = ShiftBatch::complex({{1, 1}, {2, 0}}, 4);
    EXPECT_EQ(c.arithmetic(), Arithmetic::Complex);
    EXPECT_EQ(c.batch_count(), 1u);
}

TEST(GivensTable, PaddingRowIsIdentityAndCompactRoundTrips) {
    GivensTable t(5, 2, Arithmetic::Complex);
    for (std::size_t l = 0; l < 2; ++l) {
        EXPECT_EQ(t.c()(0, l), 1.0);
        EXPECT_EQ(t.s()(0, l), 0.0);
    }
    t.set(3, 1, make_complex(0.3, {0.4, -1.2}));
    const GivensTable back = GivensTable::from_compact(t.compact(), Arithmetic::Complex);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t l = 0; l < 2; ++l) {
            EXPECT_NEAR(back.c()(j, l), t.c()(j, l), 4 * test::eps);
            EXPECT_NEAR(back.c_im()(j, l), t.c_im()(j, l), 4 * test::eps);
            EXPECT_NEAR(back.s()(j, l), t.s()(j, l), 4 * test::eps);
        }
}

TEST(CrossoverSet, SliceShapesFollowTheTileColumn) {
    const TileGrid g(10, 4);
    CrossoverSet x(g, 3, Arithmetic::Complex);
    EXPECT_EQ(x.storage_size(), (4 + 8 + 10) * 6u);
    const View v = x.slice(1, {4, 8}, {1, 3});
    EXPECT_EQ(v.rows(), 4u);
    EXPECT_EQ(v.cols(), 4u);
    EXPECT_EQ(v.ld(), 8u);
    std::vector<double> buf = x.release();
    CrossoverSet reused(g, 1, Arithmetic::Real, std::move(buf));
    EXPECT_EQ(reused.storage_size(), 22u);
}

TEST(ScalingMatrix, StartsAtOneAndReportsTheMinimum) {
    ScalingMatrix a(3, 2);
    EXPECT_EQ(a.min_factor(), 1.0);
    a(1, 1) = 0.25;
    EXPECT_EQ(a.min_factor(), 0.25);
    EXPECT_EQ(a.column(1)[1], 0.25);
}
