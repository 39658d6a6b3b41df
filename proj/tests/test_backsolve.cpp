#include <gtest/gtest.h>

#include "hsrq/backsolve.hpp"
#include "hsrq/reference.hpp"
#include "support.hpp"

using namespace hsrq;
using namespace hsrq::test;

namespace {

struct Case {
    std::size_t n, tile, batch;
    bool complex_shifts;
};

RealMatrix rhs(std::size_t n, std::size_t m, bool cplx, SplitMix64& rng) {
    RealMatrix b(n, (cplx ? 2 : 1) * m);
    for (auto& v : b.values()) v = rng.uniform(-1.0, 1.0);
    return b;
}

SolutionBlock run(const HessenbergMatrix& h, const std::vector<complex>& shifts, const RealMatrix& b, bool cplx,
                  SolverOptions opts) {
    if (cplx) return chsrq3(h, shifts, b, opts);
    std::vector<double> re;
    for (auto z : shifts) re.push_back(z.real());
    return dhsrq3(h, re, b, opts);
}

class OracleMatch : public ::testing::TestWithParam<Case> {};

TEST_P(OracleMatch, TiledSolveMatchesDenseSolve) {
    const Case c = GetParam();
    SplitMix64 rng(1000 + c.n * 7 + c.tile);
    const HessenbergMatrix h = random_hessenberg(c.n, 17 + c.n);
    const auto spec = spectrum(h);
    const std::size_t m = 5;
    const auto shifts = shifts_away(spec, m, 0.3, c.complex_shifts, rng);
    const RealMatrix b = rhs(c.n, m, c.complex_shifts, rng);

    for (bool robust : {false, true}) {
        SolverOptions opts;
        opts.tile_rows = c.tile;
        opts.batch_width = c.batch;
        opts.robust = robust;
        const SolutionBlock sol = run(h, shifts, b, c.complex_shifts, opts);
        for (std::size_t l = 0; l < m; ++l) {
            const auto x = column_of(sol.x, l, c.complex_shifts);
            const auto bl = column_of(b, l, c.complex_shifts);
            const double alpha = sol.scale.empty() ? 1.0 : sol.scale[l];
            EXPECT_EQ(alpha, 1.0);
            const auto ref = dense_solve_oracle(shifted(h, shifts[l]), bl);
            EXPECT_LE(rel_err(x, ref), 1e-10) << "robust=" << robust << " l=" << l;
            const double bound = 100.0 * c.n * eps * inf_norm(shifted(h, shifts[l])) * max_abs(x);
            EXPECT_LE(residual_inf(h, shifts[l], x, alpha, bl), bound);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Grid, OracleMatch,
                         ::testing::Values(Case{1, 1, 1, false}, Case{2, 1, 2, false}, Case{7, 3, 2, false},
                                           Case{8, 8, 3, false}, Case{16, 4, 2, false}, Case{33, 5, 4, false},
                                           Case{3, 2, 1, true}, Case{8, 2, 2, true}, Case{17, 4, 3, true},
                                           Case{32, 32, 5, true}, Case{40, 7, 2, true}));

TEST(Backsolve, RobustEqualsPlainBitwiseOnBenignInput) {
    SplitMix64 rng(5);
    const HessenbergMatrix h = random_hessenberg(45, 3);
    const auto spec = spectrum(h);
    for (bool cplx : {false, true}) {
        const auto shifts = shifts_away(spec, 6, 0.3, cplx, rng);
        const RealMatrix b = rhs(45, 6, cplx, rng);
        SolverOptions opts;
        opts.tile_rows = 8;
        opts.batch_width = 4;
        opts.robust = false;
        const auto plain = run(h, shifts, b, cplx, opts);
        opts.robust = true;
        const auto robust = run(h, shifts, b, cplx, opts);
        EXPECT_TRUE(plain.x == robust.x);
        for (double a : robust.segment_scales.values()) EXPECT_EQ(a, 1.0);
    }
}

TEST(Backsolve, TilingDoesNotChangeTheSolutionBeyondRounding) {
    SplitMix64 rng(9);
    const HessenbergMatrix h = random_hessenberg(37, 11);
    const auto shifts = shifts_away(spectrum(h), 4, 0.3, true, rng);
    const RealMatrix b = rhs(37, 4, true, rng);
    SolverOptions opts;
    opts.tile_rows = 37;
    const auto whole = run(h, shifts, b, true, opts);
    for (std::size_t tile : {1u, 2u, 6u, 13u}) {
        opts.tile_rows = tile;
        const auto tiled = run(h, shifts, b, true, opts);
        for (std::size_t l = 0; l < 4; ++l)
            EXPECT_LE(rel_err(column_of(tiled.x, l, true), column_of(whole.x, l, true)), 1e-12) << tile;
    }
}

TEST(Backsolve, BatchWidthDoesNotChangeTheSolutionAtAll) {
    SplitMix64 rng(10);
    const HessenbergMatrix h = random_hessenberg(30, 12);
    const auto shifts = shifts_away(spectrum(h), 7, 0.3, false, rng);
    const RealMatrix b = rhs(30, 7, false, rng);
    SolverOptions opts;
    opts.tile_rows = 6;
    opts.batch_width = 7;
    const auto wide = run(h, shifts, b, false, opts);
    opts.batch_width = 2;
    const auto narrow = run(h, shifts, b, false, opts);
    EXPECT_TRUE(wide.x == narrow.x);
}

TEST(Backsolve, SingleTileAgreesWithHenry) {
    SplitMix64 rng(12);
    const HessenbergMatrix h = random_hessenberg(20, 4);
    const auto shifts = shifts_away(spectrum(h), 3, 0.3, false, rng);
    const RealMatrix b = rhs(20, 3, false, rng);
    SolverOptions opts;
    opts.tile_rows = 20;
    opts.robust = false;
    const auto sol = run(h, shifts, b, false, opts);
    for (std::size_t l = 0; l < 3; ++l) {
        const auto ref = henry_rq_solve(h, shifts[l].real(), b.col(l));
        for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(sol.x(i, l), ref[i], 1e-12 * std::abs(ref[i]) + 1e-14);
    }
}

TEST(Backsolve, RealShiftsInComplexArithmeticMatchRealArithmetic) {
    SplitMix64 rng(13);
    const HessenbergMatrix h = random_hessenberg(24, 5);
    const auto shifts = shifts_away(spectrum(h), 3, 0.3, false, rng);
    const RealMatrix b = rhs(24, 3, false, rng);
    RealMatrix bc(24, 6);
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t i = 0; i < 24; ++i) bc(i, 2 * l) = b(i, l);
    SolverOptions opts;
    opts.tile_rows = 5;
    const auto re = run(h, shifts, b, false, opts);
    const auto cx = run(h, shifts, bc, true, opts);
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t i = 0; i < 24; ++i) {
            EXPECT_NEAR(cx.x(i, 2 * l), re.x(i, l), 1e-12 * std::abs(re.x(i, l)) + 1e-14);
            EXPECT_EQ(cx.x(i, 2 * l + 1), 0.0);
        }
}

TEST(Backsolve, EigenvectorModeReturnsUnitColumns) {
    const TestProblem p = gen_h1(24, 0.5, 3);
    std::vector<complex> vals(p.eigenvalues.begin(), p.eigenvalues.end());
    RealMatrix b(24, 2 * vals.size(), 1e-15);
    for (std::size_t l = 0; l < vals.size(); ++l)
        for (std::size_t i = 0; i < 24; ++i) b(i, 2 * l + 1) = 0.0;
    SolverOptions opts;
    opts.tile_rows = 5;
    opts.mode = SolveMode::Eigenvector;
    const auto sol = run(p.h, vals, b, true, opts);
    for (std::size_t l = 0; l < vals.size(); ++l) {
        const auto x = column_of(sol.x, l, true);
        EXPECT_NEAR(norm2(x), 1.0, 10 * 24 * eps);
        EXPECT_GT(sol.norms[l].value(), 0.1 / std::sqrt(24.0));
    }
}

TEST(Backsolve, BacktransformAppliesRotationsInAscendingOrder) {
    // Two rotations on n = 3, checked against explicit products.
    const std::vector<double> c{1.0, 0.6, 0.8}, s{0.0, 0.8, -0.6};
    std::vector<double> x{1.0, 2.0, 3.0};
    backtransform(c, s, x);
    std::vector<double> ref{1.0, 2.0, 3.0};
    for (std::size_t k = 1; k < 3; ++k) {
        const double u = ref[k - 1], v = ref[k];
        ref[k - 1] = c[k] * u - s[k] * v;
        ref[k] = s[k] * u + c[k] * v;
    }
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x[i], ref[i]);
}

TEST(Backsolve, ZeroRightHandSideGivesZeroSolution) {
    const HessenbergMatrix h = random_hessenberg(12, 8);
    const RealMatrix b(12, 2);
    const std::vector<double> shifts{0.123, -0.456};
    SolverOptions opts;
    opts.tile_rows = 4;
    const auto sol = dhsrq3(h, shifts, b, opts);
    for (double v : sol.x.values()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(sol.scale[0], 1.0);
}

} // namespace
