#include <gtest/gtest.h>

#include "hsrq/errors.hpp"
#include "hsrq/inviter.hpp"
#include "hsrq/reference.hpp"
#include "support.hpp"

using namespace hsrq;
using namespace hsrq::test;

namespace {

std::vector<double> real_parts(const std::vector<complex>& v) {
    std::vector<double> out;
    for (auto z : v) out.push_back(z.real());
    return out;
}

// One member of each conjugate pair, positive imaginary part first in the metadata.
std::vector<complex> upper_members(const std::vector<complex>& v) {
    std::vector<complex> out;
    for (auto z : v)
        if (z.imag() > 0.0) out.push_back(z);
    return out;
}

// Whether one solve from the standard start passes the test is a property of (H, lambda);
// an LU-based solve from the same start decides it independently.
bool first_pass_converges(const HessenbergMatrix& h, complex lambda) {
    const auto start = starting_vector(h);
    double nrm = 0.0;
    if (lambda.imag() == 0.0) {
        const auto r = hessenberg_lu_invit(h, lambda.real(), start);
        for (double v : r.x) nrm += v * v;
        nrm = std::sqrt(nrm) / r.scale;
    } else {
        const auto r = hessenberg_lu_invit(h, lambda, std::vector<complex>(start.begin(), start.end()));
        nrm = norm2(r.x) / r.scale;
    }
    return converged(nrm, h.order());
}

void expect_eigenvectors(const HessenbergMatrix& h, const EigvecResult& r, const std::vector<complex>& values) {
    const std::size_t n = h.order();
    ASSERT_EQ(r.size(), values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        EXPECT_TRUE(r.converged[k]) << k;
        EXPECT_EQ(r.restarts[k] == 0, first_pass_converges(h, values[k])) << k;
        const auto x = r.vector(k);
        EXPECT_NEAR(norm2(x), 1.0, 10 * n * eps) << k;
        EXPECT_LE(eig_residual(h, values[k], x), 100 * n * eps * h.infinity_norm()) << k;
    }
}

} // namespace

TEST(StartingVector, ScalesWithTheNorm) {
    EXPECT_EQ(starting_vector(HessenbergMatrix(RealMatrix::identity(3))), std::vector<double>(3, eps));
    RealMatrix big = RealMatrix::identity(2);
    big(0, 0) = 0x1p52;
    EXPECT_EQ(starting_vector(HessenbergMatrix(big)), std::vector<double>(2, 1.0));
    EXPECT_THROW(starting_vector(HessenbergMatrix(RealMatrix(2, 2))), ConfigError);
}

TEST(Converged, ThresholdIsStrict) {
    EXPECT_TRUE(converged(0.05, 100));
    EXPECT_FALSE(converged(0.005, 100));
    EXPECT_FALSE(converged(0.05, 4));
    EXPECT_TRUE(converged(ScaledNorm{1e300, 1e-10}, 4));
    EXPECT_FALSE(converged(ScaledNorm{0.05, 1.0}, 4));
}

TEST(Dhsrq3in, AllRealEigenvaluesConvergeOnTheFirstSolve) {
    const TestProblem p = gen_h1(256, 0.0, 11);
    InviterConfig cfg;
    cfg.tile_rows = 64;
    cfg.batch_width = 32;
    const auto vals = real_parts(p.eigenvalues);
    const EigvecResult r = dhsrq3in(p.h, vals, cfg);
    expect_eigenvectors(p.h, r, p.eigenvalues);
}

TEST(Chsrq3in, ComplexEigenvaluesAndTheirConjugates) {
    const TestProblem p = gen_h1(256, 1.0, 12);
    InviterConfig cfg;
    cfg.tile_rows = 64;
    const auto vals = upper_members(p.eigenvalues);
    const EigvecResult r = chsrq3in(p.h, vals, cfg);
    expect_eigenvectors(p.h, r, vals);
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const auto y = r.conjugate_vector(k);
        EXPECT_LE(eig_residual(p.h, std::conj(vals[k]), y), 100 * 256 * eps * p.h.infinity_norm());
    }
}

TEST(Dhsrq3in, DuplicateEigenvalueGivesTheSameVectorTwice) {
    const TestProblem p = gen_h1(32, 0.0, 3);
    const std::vector<double> vals{4.0, 4.0};
    const EigvecResult r = dhsrq3in(p.h, vals);
    const auto a = r.vector(0), b = r.vector(1);
    for (std::size_t i = 0; i < 32; ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Dhsrq3in, FarShiftIsFlaggedAndZeroFilled) {
    const TestProblem p = gen_h1(24, 0.0, 5);
    InviterConfig cfg;
    cfg.max_restarts = 2;
    const std::vector<double> vals{3.0, 1000.0};
    const EigvecResult r = dhsrq3in(p.h, vals, cfg);
    EXPECT_TRUE(r.converged[0]);
    EXPECT_EQ(r.restarts[0], 0u);
    EXPECT_FALSE(r.converged[1]);
    EXPECT_EQ(r.restarts[1], 2u);
    for (double v : r.vectors.col(1)) EXPECT_EQ(v, 0.0);
}

TEST(Dhsrq3in, RequiresAnUnreducedMatrix) {
    const std::vector<double> vals{1.0};
    EXPECT_THROW(dhsrq3in(HessenbergMatrix(RealMatrix::identity(4)), vals), StructureError);
}

TEST(Hsrq3in, GroupingDoesNotChangeTheVectors) {
    const std::size_t n = 128;
    const TestProblem p = gen_h1(n, 0.5, 21);
    std::vector<complex> selection;
    for (auto z : p.eigenvalues)
        if (z.imag() >= 0.0) selection.push_back(z);
    // Interleave so caller order is not real-first.
    std::vector<complex> mixed;
    for (std::size_t a = 0, b = selection.size(); a < b;) {
        mixed.push_back(selection[--b]);
        if (a < b) mixed.push_back(selection[a++]);
    }
    InviterConfig cfg;
    cfg.tile_rows = 32;
    const std::size_t tiles = 4;
    const EigvecResult whole = hsrq3in(p.h, mixed, cfg);
    cfg.workspace_cap = 2 * 2 * n * tiles; // g = 2
    const EigvecResult grouped = hsrq3in(p.h, mixed, cfg);

    ASSERT_EQ(grouped.size(), mixed.size());
    EXPECT_TRUE(grouped.vectors == whole.vectors);
    EXPECT_LE(grouped.peak_workspace, cfg.workspace_cap);
    EXPECT_GT(grouped.peak_workspace, 0u);
    for (std::size_t k = 0; k < mixed.size(); ++k) {
        EXPECT_EQ(grouped.is_complex[k], mixed[k].imag() != 0.0);
        EXPECT_TRUE(grouped.converged[k]);
        EXPECT_LE(eig_residual(p.h, mixed[k], grouped.vector(k)), 100 * n * eps * p.h.infinity_norm());
    }
}

TEST(Hsrq3in, AllRealSelectionEqualsDhsrq3in) {
    const TestProblem p = gen_h1(48, 0.0, 2);
    std::vector<complex> sel(p.eigenvalues.begin(), p.eigenvalues.begin() + 10);
    InviterConfig cfg;
    cfg.tile_rows = 16;
    const EigvecResult a = hsrq3in(p.h, sel, cfg);
    const EigvecResult b = dhsrq3in(p.h, real_parts(sel), cfg);
    EXPECT_TRUE(a.vectors == b.vectors);
    EXPECT_EQ(a.first_column, b.first_column);
}

TEST(Hsrq3in, CapTooSmallIsAConfigError) {
    const TestProblem p = gen_h1(16, 0.0, 2);
    InviterConfig cfg;
    cfg.tile_rows = 8;
    cfg.workspace_cap = 10;
    const std::vector<complex> sel{{1.0, 0.0}};
    EXPECT_THROW(hsrq3in(p.h, sel, cfg), ConfigError);
}

TEST(Dhsrq3in, ExactZeroPivotIsNudgedNotFatal) {
    // lambda = 1 on this instance rounds R to an exact zero pivot.
    const TestProblem p = gen_h1(128, 0.5, 21);
    EXPECT_THROW(henry_rq_solve(p.h, 1.0, std::vector<double>(128, 1.0)), SingularError);
    const std::vector<double> vals{2.0, 1.0};
    const EigvecResult r = dhsrq3in(p.h, vals);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_TRUE(r.converged[k]);
        EXPECT_LE(eig_residual(p.h, vals[k], r.vector(k)), 100 * 128 * eps * p.h.infinity_norm());
    }
}
