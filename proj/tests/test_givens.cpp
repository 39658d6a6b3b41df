#include <gtest/gtest.h>

#include "hsrq/givens.hpp"
#include "support.hpp"

using namespace hsrq;
using hsrq::test::eps;

TEST(RealRotation, AnnihilatesTheLeftEntry) {
    const RealRotation g = make_real(3.0, 4.0);
    EXPECT_DOUBLE_EQ(g.c, 0.8);
    EXPECT_DOUBLE_EQ(g.s, -0.6);
    EXPECT_DOUBLE_EQ(g.phi, 5.0);
    EXPECT_NEAR(3.0 * g.c + 4.0 * g.s, 0.0, 4 * eps);
    EXPECT_FALSE(g.degenerate);
}

TEST(RealRotation, NothingToAnnihilate) {
    const RealRotation g = make_real(0.0, 2.0);
    EXPECT_EQ(g.c, 1.0);
    EXPECT_EQ(g.s, 0.0);
    EXPECT_EQ(g.phi, 2.0);
}

TEST(RealRotation, HugeInputsDoNotOverflow) {
    const RealRotation g = make_real(1e300, 1e300);
    EXPECT_NEAR(g.phi / 1e300, std::sqrt(2.0), 4 * eps);
    EXPECT_NEAR(g.c, 1.0 / std::sqrt(2.0), 4 * eps);
    EXPECT_NEAR(g.s, -1.0 / std::sqrt(2.0), 4 * eps);
}

TEST(RealRotation, BothZeroIsDegenerateIdentity) {
    const RealRotation g = make_real(0.0, 0.0);
    EXPECT_TRUE(g.degenerate);
    EXPECT_EQ(g.c, 1.0);
    EXPECT_EQ(g.s, 0.0);
    EXPECT_EQ(g.phi, 0.0);
}

TEST(ComplexRotation, Examples) {
    const ComplexRotation id = make_complex(0.0, {1.0, 0.0});
    EXPECT_EQ(id.c, complex(1.0, 0.0));
    EXPECT_EQ(id.s, 0.0);
    EXPECT_EQ(id.phi, complex(1.0, 0.0));

    const ComplexRotation g = make_complex(1.0, {0.0, 0.0});
    EXPECT_EQ(std::abs(g.s), 1.0);
    EXPECT_EQ(std::abs(g.phi), 1.0);
    EXPECT_TRUE(make_complex(0.0, {0.0, 0.0}).degenerate);
}

TEST(ComplexRotation, RandomInputsAreUnitaryAndAnnihilate) {
    SplitMix64 rng(77);
    for (int t = 0; t < 1000; ++t) {
        const double a = rng.uniform(-10, 10);
        const complex v(rng.uniform(-10, 10), rng.uniform(-10, 10));
        const ComplexRotation g = make_complex(a, v);
        EXPECT_NEAR(std::norm(g.c) + g.s * g.s, 1.0, 4 * eps);
        // [a v] [[c, -s], [s, conj c]] = [0 phi]
        const complex first = a * g.c + v * g.s;
        const complex second = -a * g.s + v * std::conj(g.c);
        const double scale = std::hypot(a, std::abs(v));
        EXPECT_LE(std::abs(first), 8 * eps * scale);
        EXPECT_NEAR(std::abs(second - g.phi), 0.0, 8 * eps * scale);
        EXPECT_EQ(g.phi.imag(), 0.0);
    }
}

TEST(CompactEncoding, TrivialRotationDecodesExactly) {
    const RealRotation back = compact_decode(compact_encode(RealRotation{1.0, 0.0, 0.0, false}));
    EXPECT_EQ(back.c, 1.0);
    EXPECT_EQ(back.s, 0.0);
}

TEST(CompactEncoding, BranchesRoundTrip) {
    const double t1 = compact_encode(RealRotation{0.8, -0.6, 0.0, false});
    const double t2 = compact_encode(RealRotation{0.6, 0.8, 0.0, false});
    EXPECT_NE(std::abs(t1) < 0.5, std::abs(t2) < 0.5);
    const RealRotation b1 = compact_decode(t1), b2 = compact_decode(t2);
    EXPECT_NEAR(b1.c, 0.8, 4 * eps);
    EXPECT_NEAR(b1.s, -0.6, 4 * eps);
    EXPECT_NEAR(b2.c, 0.6, 4 * eps);
    EXPECT_NEAR(b2.s, 0.8, 4 * eps);
}

TEST(CompactEncoding, AllSignQuadrantsRoundTrip) {
    SplitMix64 rng(5);
    for (int t = 0; t < 2000; ++t) {
        const RealRotation g = make_real(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const RealRotation b = compact_decode(compact_encode(g));
        EXPECT_NEAR(b.c, g.c, 4 * eps);
        EXPECT_NEAR(b.s, g.s, 4 * eps);
        const ComplexRotation z = make_complex(rng.uniform(-1, 1), {rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const ComplexRotation zb = compact_decode(compact_encode(z));
        EXPECT_NEAR(std::abs(zb.c - z.c), 0.0, 8 * eps);
        EXPECT_NEAR(zb.s, z.s, 4 * eps);
    }
}

TEST(ApplyPair, Examples) {
    const auto [u, v] = apply_pair(RealRotation{}, 2.0, 3.0);
    EXPECT_EQ(u, 2.0);
    EXPECT_EQ(v, 3.0);
    const auto [p, q] = apply_pair(RealRotation{0.8, -0.6, 0.0, false}, 1.0, 0.0);
    EXPECT_EQ(p, 0.8);
    EXPECT_EQ(q, -0.6);
}
