// Property suite behind `hsrq verify`. Prints one "ok NAME: ..." or "FAIL NAME: ..." line per
// check and a closing summary line; returns 1 if anything failed.

#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "common.hpp"
#include "hsrq/backsolve.hpp"
#include "hsrq/inviter.hpp"
#include "hsrq/reference.hpp"
#include "hsrq/testprob.hpp"

namespace hsrq::cli {
namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

class Suite {
public:
    void run(const std::string& name, const std::function<std::string(std::string&)>& check) {
        std::string failure;
        std::string detail;
        try {
            detail = check(failure);
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        ++checks_;
        if (failure.empty()) {
            std::printf("ok %s: %s\n", name.c_str(), detail.c_str());
        } else {
            ++failed_;
            std::printf("FAIL %s: %s\n", name.c_str(), failure.c_str());
        }
        std::fflush(stdout);
    }
    int finish() const {
        std::printf("verify: %d checks, %d failed\n", checks_, failed_);
        return failed_ == 0 ? exit_ok : exit_numerical;
    }

private:
    int checks_ = 0;
    int failed_ = 0;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Keeps the first failure only; later ones rarely add information.
void expect(std::string& failure, bool cond, const std::string& what) {
    if (!cond && failure.empty()) failure = what;
}

SolutionBlock solve(const HessenbergMatrix& h, const std::vector<complex>& shifts, const RealMatrix& b, bool cplx,
                    const SolverOptions& opts) {
    if (cplx) return chsrq3(h, shifts, b, opts);
    std::vector<double> re;
    for (auto z : shifts) re.push_back(z.real());
    return dhsrq3(h, re, b, opts);
}

std::vector<complex> column(const RealMatrix& x, std::size_t l, bool cplx) {
    return cplx ? complex_column(x, l) : as_complex(x.col(l));
}

RealMatrix random_rhs(std::size_t n, std::size_t m, bool cplx, SplitMix64& rng) {
    RealMatrix b(n, (cplx ? 2 : 1) * m);
    for (auto& v : b.values()) v = rng.uniform(-1.0, 1.0);
    return b;
}

// Shifts on a circle outside the disk that holds every eigenvalue.
std::vector<complex> far_shifts(const HessenbergMatrix& h, std::size_t m, bool cplx, SplitMix64& rng) {
    const double r = 1.2 * h.infinity_norm() + 0.5;
    std::vector<complex> s(m);
    for (auto& z : s) {
        if (cplx) z = std::polar(r, rng.uniform(0.0, 2.0 * std::numbers::pi));
        else z = rng.uniform() < 0.5 ? -r : r;
    }
    return s;
}

// P = G_n^H ... G_2^H accumulated from the table, so (H - lambda I) P is upper triangular.
ComplexMatrix accumulate(const GivensTable& t, std::size_t l) {
    const std::size_t n = t.rows();
    ComplexMatrix p = ComplexMatrix::identity(n);
    const bool cplx = t.arithmetic() == Arithmetic::Complex;
    for (std::size_t k = n - 1; k >= 1; --k) {
        const complex c(t.c()(k, l), cplx ? t.c_im()(k, l) : 0.0);
        const double s = t.s()(k, l);
        for (std::size_t i = 0; i < n; ++i) {
            const complex u = p(i, k - 1), v = p(i, k);
            p(i, k - 1) = c * u + s * v;
            p(i, k) = -s * u + std::conj(c) * v;
        }
    }
    return p;
}

GivensTable flipped(const GivensTable& t) {
    GivensTable out(t.rows(), t.shifts(), t.arithmetic());
    for (std::size_t l = 0; l < t.shifts(); ++l)
        for (std::size_t j = 0; j < t.rows(); ++j) {
            if (t.arithmetic() == Arithmetic::Complex) {
                auto r = t.complex_rotation(j, l);
                r.s = -r.s;
                out.set(j, l, r);
            } else {
                auto r = t.real_rotation(j, l);
                r.s = -r.s;
                out.set(j, l, r);
            }
        }
    return out;
}

std::string rq_identity(std::string& failure, bool quick, bool corrupt) {
    const std::vector<std::size_t> sizes = quick ? std::vector<std::size_t>{4, 9, 16}
                                                 : std::vector<std::size_t>{2, 4, 9, 16, 25, 32};
    double worst = 0.0;
    for (std::size_t n : sizes)
        for (std::size_t br : {std::size_t{2}, std::size_t{3}, n})
            for (bool cplx : {false, true}) {
                const HessenbergMatrix h = random_hessenberg(n, 40 + n);
                SplitMix64 rng(n * 31 + br);
                std::vector<complex> shifts(3);
                for (auto& z : shifts) z = {rng.uniform(-1.0, 1.0), cplx ? rng.uniform(-1.0, 1.0) : 0.0};
                std::vector<double> re;
                for (auto z : shifts) re.push_back(z.real());
                const ShiftBatch batch = cplx ? ShiftBatch::complex(shifts, 2) : ShiftBatch::real(re, 2);
                Reduction red = tiled_reduce(h, TileGrid(n, std::min(br, n)), batch);
                if (corrupt) red.rotations = flipped(red.rotations);
                for (std::size_t l = 0; l < shifts.size(); ++l) {
                    const ComplexMatrix p = accumulate(red.rotations, l);
                    double orth = 0.0, tri = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < n; ++j) {
                            complex g = 0.0, r = 0.0;
                            for (std::size_t k = 0; k < n; ++k) {
                                g += std::conj(p(k, i)) * p(k, j);
                                r += (complex(h(i, k)) - (i == k ? shifts[l] : 0.0)) * p(k, j);
                            }
                            orth = std::max(orth, std::abs(g - (i == j ? 1.0 : 0.0)));
                            if (i > j) tri = std::max(tri, std::abs(r));
                        }
                    const double bound = 50.0 * n * eps;
                    worst = std::max(worst, std::max(orth / bound, tri / (bound * h.infinity_norm())));
                    expect(failure, orth <= bound, fmt("n=%zu b_r=%zu shift %zu: ||Q^H Q - I|| = %.2e", n, br, l, orth));
                    expect(failure, tri <= bound * h.infinity_norm(),
                           fmt("n=%zu b_r=%zu %s shift %zu: subdiagonal of (H - lambda I) Q^H is %.2e", n, br,
                               cplx ? "complex" : "real", l, tri));
                }
            }
    return fmt("worst %.3f of the bound", worst);
}

std::string oracle_equivalence(std::string& failure, bool quick) {
    const std::vector<std::size_t> sizes = quick ? std::vector<std::size_t>{8, 16, 32}
                                                 : std::vector<std::size_t>{8, 16, 32, 64, 100};
    double worst_err = 0.0, worst_res = 0.0;
    std::size_t solves = 0;
    for (std::size_t n : sizes)
        for (std::size_t br : {std::size_t{2}, std::size_t{4}, n})
            for (bool cplx : {false, true}) {
                SplitMix64 rng(n * 7 + br);
                const HessenbergMatrix h = random_hessenberg(n, 100 + n);
                const auto shifts = far_shifts(h, 3, cplx, rng);
                const RealMatrix b = random_rhs(n, 3, cplx, rng);
                SolverOptions opts;
                opts.tile_rows = br;
                opts.batch_width = 2;
                const SolutionBlock sol = solve(h, shifts, b, cplx, opts);
                for (std::size_t l = 0; l < shifts.size(); ++l, ++solves) {
                    const auto x = column(sol.x, l, cplx);
                    auto rhs = column(b, l, cplx);
                    const double res = scaled_residual(h, shifts[l], x, sol.scale[l], rhs);
                    for (auto& v : rhs) v *= sol.scale[l];
                    ComplexMatrix a(n, n);
                    for (std::size_t j = 0; j < n; ++j)
                        for (std::size_t i = 0; i < n; ++i) a(i, j) = h(i, j) - (i == j ? shifts[l] : 0.0);
                    const auto ref = dense_solve_oracle(a, rhs);
                    double d = 0.0, rn = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        d = std::max(d, std::abs(x[i] - ref[i]));
                        rn = std::max(rn, std::abs(ref[i]));
                    }
                    worst_err = std::max(worst_err, d / rn);
                    worst_res = std::max(worst_res, res / (100.0 * n * eps));
                    expect(failure, d <= 1e-10 * rn, fmt("n=%zu b_r=%zu shift %zu: relative error %.2e", n, br, l, d / rn));
                    expect(failure, res <= 100.0 * n * eps, fmt("n=%zu b_r=%zu shift %zu: residual %.2e", n, br, l, res));
                }
            }
    return fmt("%zu solves, worst relative error %.2e, worst residual %.3f of the bound", solves, worst_err, worst_res);
}

// Shifts halfway between known eigenvalues of H1: a harder system, checked by its residual.
std::string residual_between_eigenvalues(std::string& failure, bool quick) {
    const std::size_t n = quick ? 32 : 128;
    const TestProblem p = gen_h1(n, 0.5, 3);
    double worst = 0.0;
    for (bool cplx : {false, true}) {
        std::vector<complex> shifts;
        for (std::size_t k = 1; k < n; k += n / 8) shifts.emplace_back(k + 0.5, cplx ? k + 0.5 : 0.0);
        SplitMix64 rng(5);
        const RealMatrix b = random_rhs(n, shifts.size(), cplx, rng);
        SolverOptions opts;
        opts.tile_rows = 8;
        const SolutionBlock sol = solve(p.h, shifts, b, cplx, opts);
        for (std::size_t l = 0; l < shifts.size(); ++l) {
            const double res = scaled_residual(p.h, shifts[l], column(sol.x, l, cplx), sol.scale[l], column(b, l, cplx));
            worst = std::max(worst, res / (100.0 * n * eps));
            expect(failure, res <= 100.0 * n * eps, fmt("shift %g%+gi: residual %.2e", shifts[l].real(), shifts[l].imag(), res));
        }
    }
    return fmt("worst %.3f of the bound", worst);
}

std::string scaling_invariants(std::string& failure, bool quick) {
    const std::vector<complex> shift{complex(h23_shift, 0.0)};
    for (std::size_t n : quick ? std::vector<std::size_t>{64} : std::vector<std::size_t>{50, 100, 500}) {
        const HessenbergMatrix h3 = gen_h3(n);
        const RealMatrix b(n, 1, 1.0);
        SolverOptions opts;
        opts.tile_rows = 16;
        opts.robust = false;
        const SolutionBlock plain = solve(h3, shift, b, false, opts);
        opts.robust = true;
        const SolutionBlock robust = solve(h3, shift, b, false, opts);
        expect(failure, robust.segment_scales.min_factor() == 1.0 && robust.scale[0] == 1.0,
               fmt("H3 n=%zu: a scaling factor is below 1", n));
        expect(failure, robust.x == plain.x, fmt("H3 n=%zu: robust and plain solutions differ", n));
    }
    const std::size_t n = quick ? 600 : 1000;
    const HessenbergMatrix h2 = gen_h2(n);
    const RealMatrix b(n, 1, 1.0);
    SolverOptions opts;
    opts.tile_rows = 64;
    opts.robust = false;
    bool plain_finite = true;
    for (double v : solve(h2, shift, b, false, opts).x.values()) plain_finite = plain_finite && std::isfinite(v);
    opts.robust = true;
    const SolutionBlock robust = solve(h2, shift, b, false, opts);
    const auto x = column(robust.x, 0, false);
    const double res = scaled_residual(h2, shift[0], x, robust.scale[0], column(b, 0, false));
    expect(failure, !plain_finite, fmt("H2 n=%zu: plain solve did not overflow", n));
    expect(failure, robust.segment_scales.min_factor() < 1.0, fmt("H2 n=%zu: no scaling happened", n));
    expect(failure, res <= 100.0 * n * eps, fmt("H2 n=%zu: residual %.2e", n, res));
    return fmt("H2 n=%zu min factor %.2e, residual %.2e", n, robust.segment_scales.min_factor(), res);
}

std::string conjugacy(std::string& failure, bool quick) {
    const TestProblem p = gen_h1(quick ? 32 : 128, 1.0, 1);
    const EigvecResult r = chsrq3in(p.h, p.eigenvalues);
    for (std::size_t k = 0; k + 1 < p.eigenvalues.size(); k += 2) {
        const auto x = r.vector(k), y = r.vector(k + 1);
        for (std::size_t i = 0; i < x.size(); ++i)
            expect(failure, y[i] == std::conj(x[i]), fmt("pair %zu: entry %zu is not the exact conjugate", k / 2, i));
    }
    return fmt("%zu pairs", p.eigenvalues.size() / 2);
}

std::string tiling_invariance(std::string& failure, bool quick) {
    const std::size_t n = quick ? 40 : 120;
    const HessenbergMatrix h = random_hessenberg(n, 8);
    SplitMix64 rng(9);
    double worst_rot = 0.0, worst_x = 0.0;
    for (bool cplx : {false, true}) {
        const auto shifts = far_shifts(h, 4, cplx, rng);
        const RealMatrix b = random_rhs(n, 4, cplx, rng);
        std::vector<double> re;
        for (auto z : shifts) re.push_back(z.real());
        const ShiftBatch batch = cplx ? ShiftBatch::complex(shifts, 4) : ShiftBatch::real(re, 4);
        const Reduction ref = tiled_reduce(h, TileGrid(n, n), batch);
        SolverOptions opts;
        opts.tile_rows = n;
        const SolutionBlock xref = solve(h, shifts, b, cplx, opts);
        for (std::size_t br : {std::size_t{4}, std::size_t{7}}) {
            const Reduction red = tiled_reduce(h, TileGrid(n, br), batch);
            for (std::size_t k = 0; k < ref.rotations.s().values().size(); ++k) {
                worst_rot = std::max(worst_rot, std::abs(ref.rotations.s().values()[k] - red.rotations.s().values()[k]));
                worst_rot = std::max(worst_rot, std::abs(ref.rotations.c().values()[k] - red.rotations.c().values()[k]));
            }
            opts.tile_rows = br;
            const SolutionBlock x = solve(h, shifts, b, cplx, opts);
            double d = 0.0, xn = 0.0;
            for (std::size_t k = 0; k < x.x.values().size(); ++k) {
                d = std::max(d, std::abs(x.x.values()[k] - xref.x.values()[k]));
                xn = std::max(xn, std::abs(xref.x.values()[k]));
            }
            worst_x = std::max(worst_x, d / xn);
        }
    }
    expect(failure, worst_rot <= 8 * eps, fmt("rotation tables differ by %.2e across tile sizes", worst_rot));
    expect(failure, worst_x <= 1e-12, fmt("solutions differ by %.2e relative across tile sizes", worst_x));
    return fmt("rotations within %.1f eps, solutions within %.1e", worst_rot / eps, worst_x);
}

std::string batch_independence(std::string& failure, bool) {
    const std::size_t n = 50;
    const HessenbergMatrix h = random_hessenberg(n, 12);
    SplitMix64 rng(13);
    for (bool cplx : {false, true}) {
        const auto shifts = far_shifts(h, 5, cplx, rng);
        const RealMatrix b = random_rhs(n, 5, cplx, rng);
        SolverOptions opts;
        opts.tile_rows = 8;
        opts.batch_width = 5;
        const SolutionBlock all = solve(h, shifts, b, cplx, opts);
        for (std::size_t l = 0; l < 5; ++l) {
            const std::size_t w = cplx ? 2 : 1;
            RealMatrix bl(n, w);
            for (std::size_t c = 0; c < w; ++c) std::copy_n(b.col(w * l + c).begin(), n, bl.col(c).begin());
            opts.batch_width = 1;
            const SolutionBlock one = solve(h, {shifts[l]}, bl, cplx, opts);
            for (std::size_t c = 0; c < w; ++c)
                expect(failure, std::equal(one.x.col(c).begin(), one.x.col(c).end(), all.x.col(w * l + c).begin()),
                       fmt("%s shift %zu differs alone and in a batch", cplx ? "complex" : "real", l));
        }
    }
    return "bitwise";
}

std::string parallel_determinism(std::string& failure, bool quick) {
    const std::size_t n = quick ? 300 : 1024, m = quick ? 16 : 64;
    const HessenbergMatrix h = random_hessenberg(n, 21);
    SplitMix64 rng(22);
    for (bool cplx : {false, true}) {
        const auto shifts = far_shifts(h, m, cplx, rng);
        const RealMatrix b = random_rhs(n, m, cplx, rng);
        SolverOptions opts;
        opts.tile_rows = quick ? 32 : 128;
        opts.batch_width = 8;
        opts.workers = 1;
        const SolutionBlock one = solve(h, shifts, b, cplx, opts);
        opts.workers = 4;
        const SolutionBlock four = solve(h, shifts, b, cplx, opts);
        expect(failure, one.x == four.x && one.scale == four.scale,
               fmt("%s: 1 and 4 workers disagree", cplx ? "complex" : "real"));
    }
    return "1 vs 4 workers bitwise";
}

std::string eigenvectors(std::string& failure, bool quick) {
    const std::size_t n = quick ? 64 : 256;
    const TestProblem p = gen_h1(n, 0.5, 4);
    std::vector<complex> sel;
    for (auto z : p.eigenvalues)
        if (z.imag() >= 0.0) sel.push_back(z);
    InviterConfig cfg;
    cfg.tile_rows = 16;
    const EigvecResult r = hsrq3in(p.h, sel, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < sel.size(); ++k) {
        expect(failure, r.converged[k], fmt("lambda %g%+gi did not converge", sel[k].real(), sel[k].imag()));
        if (!r.converged[k]) continue;
        const auto x = r.vector(k);
        double nrm = 0.0;
        for (auto v : x) nrm += std::norm(v);
        const double res = eigen_residual(p.h, sel[k], x);
        worst = std::max(worst, res / (100.0 * n * eps * p.h.infinity_norm()));
        expect(failure, std::abs(std::sqrt(nrm) - 1.0) <= 10.0 * n * eps, fmt("lambda %g: not unit norm", sel[k].real()));
        expect(failure, res <= 100.0 * n * eps * p.h.infinity_norm(), fmt("lambda %g: residual %.2e", sel[k].real(), res));
    }
    return fmt("%zu vectors, worst residual %.3f of the bound", sel.size(), worst);
}

} // namespace

int run_verify(bool quick, bool corrupt_givens) {
    Suite suite;
    suite.run("rq_identity", [&](std::string& f) { return rq_identity(f, quick, corrupt_givens); });
    suite.run("oracle_equivalence", [&](std::string& f) { return oracle_equivalence(f, quick); });
    suite.run("residual_between_eigenvalues", [&](std::string& f) { return residual_between_eigenvalues(f, quick); });
    suite.run("scaling_invariants", [&](std::string& f) { return scaling_invariants(f, quick); });
    suite.run("conjugacy", [&](std::string& f) { return conjugacy(f, quick); });
    suite.run("tiling_invariance", [&](std::string& f) { return tiling_invariance(f, quick); });
    suite.run("batch_independence", [&](std::string& f) { return batch_independence(f, quick); });
    suite.run("parallel_determinism", [&](std::string& f) { return parallel_determinism(f, quick); });
    suite.run("eigenvectors", [&](std::string& f) { return eigenvectors(f, quick); });
    return suite.finish();
}

} // namespace hsrq::cli
