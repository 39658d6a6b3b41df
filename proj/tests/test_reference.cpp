#include <gtest/gtest.h>

#include "hsrq/backsolve.hpp"
#include "hsrq/errors.hpp"
#include "hsrq/reference.hpp"
#include "support.hpp"

using namespace hsrq;
using namespace hsrq::test;

TEST(Henry, TwoByTwoClosedForm) {
    RealMatrix a(2, 2);
    a(0, 0) = 2.0; a(0, 1) = 1.0; a(1, 0) = 1.0; a(1, 1) = 3.0;
    const HessenbergMatrix h(a);
    const std::vector<double> b{1.0, 2.0};
    const auto x = henry_rq_solve(h, 0.0, b);
    // det = 5: x = [3*1 - 1*2, -1*1 + 2*2] / 5
    EXPECT_NEAR(x[0], 0.2, 8 * eps);
    EXPECT_NEAR(x[1], 0.6, 8 * eps);
}

TEST(Henry, AgreesWithTiledSolver) {
    SplitMix64 rng(21);
    const HessenbergMatrix h = random_hessenberg(64, 21);
    const auto spec = spectrum(h);
    for (bool cplx : {false, true}) {
        const auto shifts = shifts_away(spec, 3, 0.5, cplx, rng);
        RealMatrix b(64, (cplx ? 2 : 1) * 3);
        for (auto& v : b.values()) v = rng.uniform(-1, 1);
        SolverOptions opts;
        opts.tile_rows = 16;
        const SolutionBlock sol = cplx ? chsrq3(h, shifts, b, opts) : [&] {
            std::vector<double> re;
            for (auto z : shifts) re.push_back(z.real());
            return dhsrq3(h, re, b, opts);
        }();
        for (std::size_t l = 0; l < 3; ++l) {
            const auto tiled = column_of(sol.x, l, cplx);
            std::vector<complex> ref;
            if (cplx) {
                ref = henry_rq_solve(h, shifts[l], complex_column(b, l));
            } else {
                const auto r = henry_rq_solve(h, shifts[l].real(), b.col(l));
                ref.assign(r.begin(), r.end());
            }
            EXPECT_LE(rel_err(tiled, ref), 1e-12);
        }
    }
}

TEST(Henry, TraceMatchesSingleTileReduction) {
    const HessenbergMatrix h = random_hessenberg(10, 2);
    HenryTrace trace;
    const std::vector<double> b(10, 1.0);
    henry_rq_solve(h, 0.4, b, &trace);
    const Reduction red = tiled_reduce(h, TileGrid(10, 10), ShiftBatch::real({0.4}, 1));
    for (std::size_t k = 0; k < 10; ++k) {
        EXPECT_NEAR(trace.c[k].real(), red.rotations.c()(k, 0), 4 * eps);
        EXPECT_NEAR(trace.s[k], red.rotations.s()(k, 0), 4 * eps);
    }
}

TEST(Henry, FlopCountIsThreeAndAHalfNSquared) {
    const std::size_t n = 512;
    const HessenbergMatrix h = random_hessenberg(n, 3);
    const std::vector<double> b(n, 1.0);
    FlopCounters f;
    henry_rq_solve(h, 0.3, b, nullptr, &f);
    EXPECT_NEAR(static_cast<double>(f.flops(KernelKind::Solve)) / (3.5 * n * n), 1.0, 0.15);
}

TEST(Henry, ZeroPivotIsSingular) {
    RealMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(1, 0) = 1.0;
    a(0, 1) = 1.0;
    a(1, 1) = 1.0;
    const std::vector<double> b{1.0, 1.0};
    EXPECT_THROW(henry_rq_solve(HessenbergMatrix(a), 0.0, b), SingularError);
}

TEST(LuInvit, FarShiftMatchesDenseOracle) {
    SplitMix64 rng(4);
    const HessenbergMatrix h = random_hessenberg(40, 4);
    const auto shifts = shifts_away(spectrum(h), 2, 0.5, true, rng);
    std::vector<complex> b(40);
    for (auto& v : b) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto r = hessenberg_lu_invit(h, shifts[0], b);
    EXPECT_EQ(r.scale, 1.0);
    EXPECT_LE(rel_err(r.x, dense_solve_oracle(shifted(h, shifts[0]), b)), 1e-11);
    EXPECT_LE(r.interchanges, 39u);

    std::vector<double> br(40);
    for (auto& v : br) v = rng.uniform(-1, 1);
    const auto rr = hessenberg_lu_invit(h, shifts[1].real(), br);
    const auto ref = dense_solve_oracle(shifted(h, shifts[1].real()), std::vector<complex>(br.begin(), br.end()));
    EXPECT_LE(rel_err(std::vector<complex>(rr.x.begin(), rr.x.end()), ref), 1e-11);
}

TEST(LuInvit, EigenvalueShiftGivesAnEigenvector) {
    const TestProblem p = gen_h1(32, 0.0, 6);
    const double lambda = p.eigenvalues[5].real();
    const std::vector<double> b(32, eps * p.h.infinity_norm());
    const auto r = hessenberg_lu_invit(p.h, lambda, b);
    std::vector<complex> x(r.x.begin(), r.x.end());
    for (auto& v : x) {
        ASSERT_TRUE(std::isfinite(v.real()));
    }
    const double nrm = norm2(x);
    ASSERT_GT(nrm, 0.0);
    for (auto& v : x) v /= nrm;
    EXPECT_LE(eig_residual(p.h, lambda, x), 100 * 32 * eps * p.h.infinity_norm());
}

TEST(DenseOracle, IdentityAndDiagonallyDominant) {
    const std::vector<complex> b{{1, 1}, {2, 0}, {0, -3}};
    EXPECT_EQ(dense_solve_oracle(ComplexMatrix::identity(3), b), b);

    SplitMix64 rng(2);
    RealMatrix a(16, 16);
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t i = 0; i < 16; ++i) a(i, j) = i == j ? 20.0 : rng.uniform(-1, 1);
    std::vector<double> rhs(16);
    for (auto& v : rhs) v = rng.uniform(-1, 1);
    const auto x = dense_solve_oracle(a, rhs);
    double res = 0.0, xn = 0.0, an = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        double acc = -rhs[i], row = 0.0;
        for (std::size_t j = 0; j < 16; ++j) {
            acc += a(i, j) * x[j];
            row += std::abs(a(i, j));
        }
        res = std::max(res, std::abs(acc));
        an = std::max(an, row);
        xn = std::max(xn, std::abs(x[i]));
    }
    EXPECT_LE(res, 1e-13 * an * xn);
    EXPECT_THROW(dense_solve_oracle(RealMatrix(2, 2), std::vector<double>{1, 1}), SingularError);
}
