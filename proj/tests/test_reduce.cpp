#include <gtest/gtest.h>

#include "hsrq/errors.hpp"
#include "hsrq/reduce.hpp"
#include "hsrq/scheduler.hpp"
#include "support.hpp"

using namespace hsrq;
using namespace hsrq::test;

namespace {

ShiftBatch batch_of(const std::vector<complex>& shifts, bool cplx, std::size_t width) {
    if (cplx) return ShiftBatch::complex(shifts, width);
    std::vector<double> re;
    for (auto z : shifts) re.push_back(z.real());
    return ShiftBatch::real(re, width);
}

// Largest |entry| below the diagonal of (H - lambda I) P, and ||P^H P - I||_max.
std::pair<double, double> rq_defects(const HessenbergMatrix& h, const GivensTable& t, std::size_t l,
                                     complex lambda) {
    const std::size_t n = h.order();
    const ComplexMatrix p = accumulate_rotations(t, l);
    const ComplexMatrix a = shifted(h, lambda);
    double below = 0.0, orth = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            complex ap, pp;
            for (std::size_t k = 0; k < n; ++k) {
                ap += a(i, k) * p(k, j);
                pp += std::conj(p(k, i)) * p(k, j);
            }
            if (i > j) below = std::max(below, std::abs(ap));
            orth = std::max(orth, std::abs(pp - (i == j ? 1.0 : 0.0)));
        }
    return {below, orth};
}

} // namespace

TEST(TiledReduce, RqIdentityRealSmall) {
    const HessenbergMatrix h = random_hessenberg(4, 2);
    const ShiftBatch s = ShiftBatch::real({0.37}, 1);
    const Reduction red = tiled_reduce(h, TileGrid(4, 2), s);
    const auto [below, orth] = rq_defects(h, red.rotations, 0, 0.37);
    EXPECT_LE(below, 50 * eps * h.infinity_norm());
    EXPECT_LE(orth, 50 * 4 * eps);
}

TEST(TiledReduce, RqIdentityComplex) {
    const HessenbergMatrix h = random_hessenberg(8, 3);
    const ShiftBatch s = ShiftBatch::complex({{0.2, 0.7}, {-1.0, -0.3}}, 2);
    const Reduction red = tiled_reduce(h, TileGrid(8, 3), s);
    for (std::size_t l = 0; l < 2; ++l) {
        const auto [below, orth] = rq_defects(h, red.rotations, l, s.complex_values()[l]);
        EXPECT_LE(below, 100 * eps * h.infinity_norm());
        EXPECT_LE(orth, 50 * 8 * eps);
    }
}

TEST(TiledReduce, TopLeftPaddingRotationIsIdentity) {
    const HessenbergMatrix h = random_hessenberg(9, 4);
    for (bool cplx : {false, true}) {
        const Reduction red = tiled_reduce(h, TileGrid(9, 4), batch_of({{0.5, cplx ? 0.5 : 0.0}}, cplx, 1));
        EXPECT_EQ(red.rotations.c()(0, 0), 1.0);
        EXPECT_EQ(red.rotations.s()(0, 0), 0.0);
        if (cplx) EXPECT_EQ(red.rotations.c_im()(0, 0), 0.0);
    }
}

TEST(TiledReduce, TwoByTwoSingleRotation) {
    RealMatrix a(2, 2);
    a(0, 0) = 1.0; a(0, 1) = 2.0; a(1, 0) = 3.0; a(1, 1) = 4.0;
    const HessenbergMatrix h(a);
    const Reduction red = tiled_reduce(h, TileGrid(2, 2), ShiftBatch::real({0.0}, 1));
    // [h(1,0) h(1,1)] = [3 4] -> c = 0.8, s = -0.6.
    EXPECT_DOUBLE_EQ(red.rotations.c()(1, 0), 0.8);
    EXPECT_DOUBLE_EQ(red.rotations.s()(1, 0), -0.6);
}

TEST(TiledReduce, RotationsDoNotDependOnTileSize) {
    const HessenbergMatrix h = random_hessenberg(12, 6);
    SplitMix64 rng(1);
    const auto shifts = shifts_away(spectrum(h), 3, 0.1, true, rng);
    for (bool cplx : {false, true}) {
        const ShiftBatch s = batch_of(shifts, cplx, 2);
        const Reduction ref = tiled_reduce(h, TileGrid(12, 12), s);
        for (std::size_t b : {2u, 3u, 5u}) {
            const Reduction red = tiled_reduce(h, TileGrid(12, b), s);
            for (std::size_t j = 0; j < 12; ++j)
                for (std::size_t l = 0; l < 3; ++l) {
                    EXPECT_NEAR(red.rotations.c()(j, l), ref.rotations.c()(j, l), 4 * eps);
                    EXPECT_NEAR(red.rotations.s()(j, l), ref.rotations.s()(j, l), 4 * eps);
                    if (cplx) EXPECT_NEAR(red.rotations.c_im()(j, l), ref.rotations.c_im()(j, l), 4 * eps);
                }
        }
    }
}

TEST(TiledReduce, ComplexWithZeroImaginaryPartMatchesReal) {
    const HessenbergMatrix h = random_hessenberg(15, 9);
    const std::vector<complex> shifts{{0.3, 0.0}, {-0.8, 0.0}};
    const Reduction re = tiled_reduce(h, TileGrid(15, 4), batch_of(shifts, false, 2));
    const Reduction cx = tiled_reduce(h, TileGrid(15, 4), batch_of(shifts, true, 2));
    for (std::size_t j = 0; j < 15; ++j)
        for (std::size_t l = 0; l < 2; ++l) {
            EXPECT_NEAR(cx.rotations.c()(j, l), re.rotations.c()(j, l), 8 * eps);
            EXPECT_EQ(cx.rotations.c_im()(j, l), 0.0);
            EXPECT_NEAR(cx.rotations.s()(j, l), re.rotations.s()(j, l), 8 * eps);
        }
}

TEST(TiledReduce, H2LastCrossoverColumnStartsAsShiftedLastColumn) {
    const HessenbergMatrix h = gen_h2(6);
    const double lambda = 0.25;
    const TileGrid grid(6, 3);
    const Reduction red = tiled_reduce(h, grid, ShiftBatch::real({lambda}, 1));
    const ConstView last = std::as_const(red.crossover).slice(1, {0, 6}, {0, 1});
    const std::vector<double> expect{-6, 0, 0, 0, 0, 2.0 - lambda};
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(last(i, 0), expect[i]);
}

TEST(TiledReduce, DegenerateRotationNamesRowAndShift) {
    // Zero last column and zero subdiagonal: the rotation at row 2 sees two zeros.
    RealMatrix a(3, 3);
    a(0, 0) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = 1.0;
    const HessenbergMatrix h(a);
    try {
        tiled_reduce(h, TileGrid(3, 2), ShiftBatch::real({1.0, 0.0}, 2));
        FAIL();
    } catch (const TaskFailure& f) {
        try {
            f.rethrow_cause();
        } catch (const StructureError& e) {
            EXPECT_EQ(e.row(), 2u);
            EXPECT_EQ(e.shift(), 1u);
        }
    }
}

TEST(ReduceOffdiag, ZeroSentinelEqualsZeroShifts) {
    SplitMix64 rng(2);
    const std::size_t m = 5, k = 4, w = 3;
    RealMatrix ht(m, k), right(m, w), c(k, w), s(k, w);
    for (auto& v : ht.values()) v = rng.uniform(-1, 1);
    for (auto& v : right.values()) v = rng.uniform(-1, 1);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = 0; l < w; ++l) {
            const RealRotation g = make_real(rng.uniform(-1, 1), rng.uniform(-1, 1));
            c(j, l) = g.c;
            s(j, l) = g.s;
        }
    const RotationSlice<const double> rot{std::as_const(c).view(), {}, std::as_const(s).view()};
    RealMatrix left_a(m, w), left_b(m, w);
    const std::vector<double> zeros(w, 0.0);
    reduce_offdiag(std::as_const(ht).view(), std::as_const(right).view(), zero_shift, rot, left_a.view());
    reduce_offdiag(std::as_const(ht).view(), std::as_const(right).view(), zeros, rot, left_b.view());
    EXPECT_TRUE(left_a == left_b);
}

TEST(ReduceOffdiag, IdentityRotationsPassTheShiftedFirstColumnThrough) {
    SplitMix64 rng(3);
    const std::size_t m = 4, k = 3;
    RealMatrix ht(m, k), right(m, 1), c(k, 1, 1.0), s(k, 1, 0.0);
    for (auto& v : ht.values()) v = rng.uniform(-1, 1);
    for (auto& v : right.values()) v = rng.uniform(-1, 1);
    const RotationSlice<const double> rot{std::as_const(c).view(), {}, std::as_const(s).view()};
    RealMatrix left(m, 1);
    const std::vector<double> shift{0.75};
    reduce_offdiag(std::as_const(ht).view(), std::as_const(right).view(), shift, rot, left.view());
    for (std::size_t i = 0; i < m; ++i) EXPECT_EQ(left(i, 0), ht(i, 0) - (i + 1 == m ? 0.75 : 0.0));
}

TEST(ReduceFlops, DiagonalTileCountsMatchTheQuadraticModel) {
    const std::size_t k = 256;
    const HessenbergMatrix h = random_hessenberg(k, 1);
    FlopCounters f;
    tiled_reduce(h, TileGrid(k, k), ShiftBatch::real({0.1, 0.2}, 2), {1, &f, nullptr});
    EXPECT_NEAR(f.per_shift_call(KernelKind::ReduceDiag) / (1.5 * k * k), 1.0, 0.15);
    f.reset();
    tiled_reduce(h, TileGrid(k, k), ShiftBatch::complex({{0.1, 1.0}}, 1), {1, &f, nullptr});
    EXPECT_NEAR(f.per_shift_call(KernelKind::ReduceDiag) / (3.0 * k * k), 1.0, 0.15);
}
