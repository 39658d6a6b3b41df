#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "CLI11.hpp"

#include "common.hpp"
#include "hsrq/backsolve.hpp"
#include "hsrq/errors.hpp"
#include "hsrq/inviter.hpp"
#include "hsrq/io.hpp"
#include "hsrq/reference.hpp"
#include "hsrq/scheduler.hpp"
#include "hsrq/testprob.hpp"

using namespace hsrq;
using namespace hsrq::cli;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void add_matrix_flags(CLI::App* cmd, MatrixSource& src) {
    cmd->add_option("--matrix", src.file, "matrix file (binary or text)");
    cmd->add_option("--problem", src.problem, "generated test matrix")
        ->check(CLI::IsMember({"h1", "h2", "h3", "random"}));
    cmd->add_option("-n,--n", src.n, "order of the generated matrix")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", src.seed, "seed for generated matrices, shifts and right-hand sides");
    cmd->add_option("--complex-fraction", src.complex_fraction, "share of complex eigenvalues for h1")
        ->check(CLI::Range(0.0, 1.0));
}

struct Tiling {
    std::size_t tile_rows = 128;
    std::size_t batch = 32;
    std::size_t workers = 0; // 0: HSRQ_WORKERS or available parallelism
};

void add_tiling_flags(CLI::App* cmd, Tiling& t) {
    cmd->add_option("--tile-rows", t.tile_rows, "tile size b_r")->check(CLI::PositiveNumber);
    cmd->add_option("--batch", t.batch, "shift batch width b_c")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", t.workers, "worker threads; 0 uses HSRQ_WORKERS or all cores");
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    MatrixSource src;
    std::string out;
    bool text = false;
    std::string eigenvalues_out;
};

int cmd_gen(GenArgs& a) {
    if (a.src.problem.empty()) throw UsageError("gen needs --problem");
    const LoadedMatrix m = load_matrix(a.src);
    if (a.text) write_matrix_text(a.out, m.h.dense());
    else write_matrix_binary(a.out, m.h.dense(), matrix_flag_hessenberg);
    if (!a.eigenvalues_out.empty()) {
        if (!m.eigenvalues) throw UsageError("eigenvalues are only known for h1");
        Output out(a.eigenvalues_out);
        for (auto z : *m.eigenvalues) std::fprintf(out.get(), "%.17g %.17g\n", z.real(), z.imag());
    }
    return exit_ok;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    MatrixSource src;
    Tiling tiling;
    std::string shifts_file;
    std::size_t random_shifts = 0;
    bool complex_shifts = false;
    std::string rhs = "ones";
    std::string solver = "tiled";
    std::string robust = "on";
    std::string out;
};

std::vector<complex> pick_shifts(const SolveArgs& a, const LoadedMatrix& m) {
    if (!a.shifts_file.empty()) return read_shifts(a.shifts_file);
    if (a.random_shifts > 0) {
        SplitMix64 rng(a.src.seed ^ 0x51f7);
        const double r = m.h.infinity_norm();
        std::vector<complex> s(a.random_shifts);
        for (auto& z : s) z = {rng.uniform(-r, r), a.complex_shifts ? rng.uniform(0.0, r) : 0.0};
        return s;
    }
    if (a.src.problem == "h2" || a.src.problem == "h3") return {complex(h23_shift, 0.0)};
    throw UsageError("a shift source is required: --shifts FILE or --random-shifts M");
}

int cmd_solve(SolveArgs& a) {
    const LoadedMatrix m = load_matrix(a.src);
    const std::vector<complex> shifts = pick_shifts(a, m);
    const std::size_t n = m.h.order(), count = shifts.size();
    const bool cplx = std::any_of(shifts.begin(), shifts.end(), [](complex z) { return z.imag() != 0.0; });
    const std::size_t width = cplx ? 2 : 1;

    RealMatrix b(n, width * count, 1.0);
    if (a.rhs == "random") {
        SplitMix64 rng(a.src.seed ^ 0xb0b);
        for (auto& v : b.values()) v = rng.uniform(-1.0, 1.0);
    } else if (cplx) {
        for (std::size_t l = 0; l < count; ++l)
            for (auto& v : b.col(2 * l + 1)) v = 0.0;
    }

    RealMatrix x(n, width * count);
    std::vector<double> alpha(count, 1.0), seconds(count, 0.0);
    if (a.solver == "tiled") {
        SolverOptions opts;
        opts.tile_rows = a.tiling.tile_rows;
        opts.batch_width = a.tiling.batch;
        opts.workers = a.tiling.workers;
        opts.robust = a.robust == "on";
        const auto t0 = Clock::now();
        SolutionBlock sol;
        if (cplx) {
            sol = chsrq3(m.h, shifts, b, opts);
        } else {
            std::vector<double> re;
            for (auto z : shifts) re.push_back(z.real());
            sol = dhsrq3(m.h, re, b, opts);
        }
        const double t = since(t0);
        x = std::move(sol.x);
        if (opts.robust) alpha = sol.scale;
        std::fill(seconds.begin(), seconds.end(), t / static_cast<double>(count));
    } else {
        // --robust only selects the tiled variant: henry never scales, lu always does.
        for (std::size_t l = 0; l < count; ++l) {
            const auto t0 = Clock::now();
            if (cplx) {
                const auto bl = complex_column(b, l);
                if (a.solver == "henry") {
                    set_complex_column(x, l, henry_rq_solve(m.h, shifts[l], bl));
                } else {
                    const auto r = hessenberg_lu_invit(m.h, shifts[l], bl);
                    set_complex_column(x, l, r.x);
                    alpha[l] = r.scale;
                }
            } else {
                const auto bl = b.col(l);
                auto xl = x.col(l);
                if (a.solver == "henry") {
                    const auto r = henry_rq_solve(m.h, shifts[l].real(), bl);
                    std::copy(r.begin(), r.end(), xl.begin());
                } else {
                    const auto r = hessenberg_lu_invit(m.h, shifts[l].real(), bl);
                    std::copy(r.x.begin(), r.x.end(), xl.begin());
                    alpha[l] = r.scale;
                }
            }
            seconds[l] = since(t0);
        }
    }

    Output out(a.out);
    std::fprintf(out.get(), "index,shift_re,shift_im,alpha,residual,finite,seconds\n");
    std::size_t overflowed = 0;
    for (std::size_t l = 0; l < count; ++l) {
        const auto xl = cplx ? complex_column(x, l) : as_complex(x.col(l));
        const auto bl = cplx ? complex_column(b, l) : as_complex(b.col(l));
        const bool finite = std::all_of(xl.begin(), xl.end(),
                                        [](complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
        overflowed += finite ? 0 : 1;
        const double res = finite ? scaled_residual(m.h, shifts[l], xl, alpha[l], bl) : INFINITY;
        std::fprintf(out.get(), "%zu,%.17g,%.17g,%.17g,%.6e,%d,%.6e\n", l, shifts[l].real(), shifts[l].imag(), alpha[l],
                     res, finite ? 1 : 0, seconds[l]);
    }
    if (overflowed > 0) {
        std::fprintf(stderr, "hsrq: overflow: %zu of %zu solutions are not finite\n", overflowed, count);
        return exit_numerical;
    }
    return exit_ok;
}

// ---------------------------------------------------------------- invit

struct InvitArgs {
    MatrixSource src;
    Tiling tiling;
    std::string select = "all";
    std::string eigenvalues_file;
    std::string select_file;
    std::size_t wmax = 0;
    std::size_t max_restarts = 3;
    std::string out;
};

int cmd_invit(InvitArgs& a) {
    const LoadedMatrix m = load_matrix(a.src);
    std::vector<complex> selection;
    if (a.select == "file") {
        if (a.select_file.empty()) throw UsageError("--select file needs --select-file");
        selection = read_shifts(a.select_file);
    } else {
        std::vector<complex> values;
        if (!a.eigenvalues_file.empty()) values = read_shifts(a.eigenvalues_file);
        else if (m.eigenvalues) values = *m.eigenvalues;
        else throw UsageError("eigenvalues are needed: --eigenvalues FILE or --problem h1");
        for (auto z : values) {
            if (z.imag() < 0.0) continue; // the conjugate's vector is the conjugate
            const bool real = z.imag() == 0.0;
            if (a.select == "all" || (a.select == "real") == real) selection.push_back(z);
        }
    }

    InviterConfig cfg;
    cfg.tile_rows = a.tiling.tile_rows;
    cfg.batch_width = a.tiling.batch;
    cfg.workers = a.tiling.workers;
    cfg.max_restarts = a.max_restarts;
    cfg.workspace_cap = a.wmax;
    const auto t0 = Clock::now();
    const EigvecResult r = hsrq3in(m.h, selection, cfg);
    const double t = since(t0);

    Output out(a.out);
    std::fprintf(out.get(), "index,lambda_re,lambda_im,converged,restarts,residual\n");
    std::size_t failed = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double res = r.converged[k] ? eigen_residual(m.h, selection[k], r.vector(k)) / m.h.infinity_norm()
                                          : INFINITY;
        failed += r.converged[k] ? 0 : 1;
        std::fprintf(out.get(), "%zu,%.17g,%.17g,%d,%zu,%.6e\n", k, selection[k].real(), selection[k].imag(),
                     r.converged[k] ? 1 : 0, r.restarts[k], res);
    }
    std::fprintf(stderr, "hsrq: %zu eigenvectors, %zu not converged, %.3f s, peak workspace %zu reals\n", r.size(),
                 failed, t, r.peak_workspace);
    return exit_ok; // non-convergence is reported per column, not as a failure
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    MatrixSource src;
    Tiling tiling;
    std::size_t shifts = 64;
    bool complex_shifts = false;
    std::string sweep = "1,max";
    bool henry = false;
    std::size_t repeat = 1;
    std::string out;
};

std::vector<std::size_t> parse_sweep(const std::string& text) {
    std::vector<std::size_t> w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "max") {
            w.push_back(resolve_workers(0));
            continue;
        }
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(item, &used);
            if (used != item.size() || v == 0) throw std::invalid_argument(item);
            w.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("bad worker count in --workers-sweep: " + item);
        }
    }
    if (w.empty()) throw UsageError("--workers-sweep is empty");
    return w;
}

// FNV-1a over the bit patterns, so identical results print identical checksums.
std::uint64_t checksum(std::span<const double> v) {
    std::uint64_t hsh = 0xcbf29ce484222325ULL;
    for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        for (int k = 0; k < 8; ++k) {
            hsh ^= (bits >> (8 * k)) & 0xff;
            hsh *= 0x100000001b3ULL;
        }
    }
    return hsh;
}

int cmd_bench(BenchArgs& a) {
    if (a.src.problem.empty() && a.src.file.empty()) a.src.problem = "random";
    const LoadedMatrix m = load_matrix(a.src);
    const std::size_t n = m.h.order(), count = a.shifts;
    SplitMix64 rng(a.src.seed ^ 0xbe4c);
    std::vector<complex> shifts(count);
    for (auto& z : shifts) z = {rng.uniform(-2.0, 2.0), a.complex_shifts ? rng.uniform(0.5, 2.0) : 0.0};
    std::vector<double> re;
    for (auto z : shifts) re.push_back(z.real());
    const std::size_t width = a.complex_shifts ? 2 : 1;
    RealMatrix b(n, width * count);
    for (auto& v : b.values()) v = rng.uniform(-1.0, 1.0);

    Output out(a.out);
    std::fprintf(out.get(), "solver,arithmetic,n,tile_rows,batch,shifts,workers,repeat,wall_seconds");
    for (std::size_t k = 0; k < kernel_kind_count; ++k)
        std::fprintf(out.get(), ",%s_seconds", std::string(kernel_name(static_cast<KernelKind>(k))).c_str());
    for (std::size_t k = 0; k < kernel_kind_count; ++k) {
        const std::string name(kernel_name(static_cast<KernelKind>(k)));
        std::fprintf(out.get(), ",%s_flops,%s_flops_per_tile_shift", name.c_str(), name.c_str());
    }
    std::fprintf(out.get(), ",checksum\n");

    const char* arith = a.complex_shifts ? "complex" : "real";
    for (std::size_t workers : parse_sweep(a.sweep)) {
        for (std::size_t rep = 0; rep < a.repeat; ++rep) {
            FlopCounters flops;
            KernelTimes times;
            SolverOptions opts;
            opts.tile_rows = a.tiling.tile_rows;
            opts.batch_width = a.tiling.batch;
            opts.workers = workers;
            opts.flops = &flops;
            opts.times = &times;
            const auto t0 = Clock::now();
            const SolutionBlock sol = a.complex_shifts ? chsrq3(m.h, shifts, b, opts) : dhsrq3(m.h, re, b, opts);
            const double wall = since(t0);
            std::fprintf(out.get(), "tiled,%s,%zu,%zu,%zu,%zu,%zu,%zu,%.6f", arith, n, a.tiling.tile_rows,
                         a.tiling.batch, count, workers, rep, wall);
            for (std::size_t k = 0; k < kernel_kind_count; ++k)
                std::fprintf(out.get(), ",%.6f", times.seconds(static_cast<KernelKind>(k)));
            const double tile = static_cast<double>(std::min(a.tiling.tile_rows, n));
            for (std::size_t k = 0; k < kernel_kind_count; ++k) {
                const auto kind = static_cast<KernelKind>(k);
                std::fprintf(out.get(), ",%llu,%.4f", static_cast<unsigned long long>(flops.flops(kind)),
                             flops.per_shift_call(kind) / (tile * tile));
            }
            std::fprintf(out.get(), ",%016llx\n", static_cast<unsigned long long>(checksum(sol.x.values())));
            std::fflush(out.get());
        }
    }

    if (a.henry) {
        FlopCounters flops;
        RealMatrix x(n, width * count);
        const auto t0 = Clock::now();
        for (std::size_t l = 0; l < count; ++l) {
            if (a.complex_shifts) {
                set_complex_column(x, l, henry_rq_solve(m.h, shifts[l], complex_column(b, l), nullptr, &flops));
            } else {
                const auto r = henry_rq_solve(m.h, re[l], b.col(l), nullptr, &flops);
                std::copy(r.begin(), r.end(), x.col(l).begin());
            }
        }
        const double wall = since(t0);
        std::fprintf(out.get(), "henry,%s,%zu,%zu,1,%zu,1,0,%.6f", arith, n, n, count, wall);
        for (std::size_t k = 0; k < kernel_kind_count; ++k) std::fprintf(out.get(), ",");
        for (std::size_t k = 0; k < kernel_kind_count; ++k) {
            const auto kind = static_cast<KernelKind>(k);
            std::fprintf(out.get(), ",%llu,%.4f", static_cast<unsigned long long>(flops.flops(kind)),
                         flops.per_shift_call(kind) / (static_cast<double>(n) * n));
        }
        std::fprintf(out.get(), ",%016llx\n", static_cast<unsigned long long>(checksum(x.values())));
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tiled robust solver for shifted Hessenberg systems and inverse iteration"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen", "write a generated test matrix to a file");
    add_matrix_flags(c_gen, gen.src);
    c_gen->add_option("-o,--out", gen.out, "output file")->required();
    c_gen->add_flag("--text", gen.text, "write the text format instead of binary");
    c_gen->add_option("--eigenvalues-out", gen.eigenvalues_out, "also write the known eigenvalues (h1)");

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "solve (H - lambda I) x = alpha b for a list of shifts");
    add_matrix_flags(c_solve, solve.src);
    add_tiling_flags(c_solve, solve.tiling);
    c_solve->add_option("--shifts", solve.shifts_file, "shift file, one 're [im]' per line");
    c_solve->add_option("--random-shifts", solve.random_shifts, "draw this many shifts instead");
    c_solve->add_flag("--complex-shifts", solve.complex_shifts, "random shifts get imaginary parts");
    c_solve->add_option("--rhs", solve.rhs, "right-hand sides")->check(CLI::IsMember({"ones", "random"}));
    c_solve->add_option("--solver", solve.solver)->check(CLI::IsMember({"tiled", "henry", "lu"}));
    c_solve->add_option("--robust", solve.robust)->check(CLI::IsMember({"on", "off"}));
    c_solve->add_option("-o,--out", solve.out, "CSV output (default stdout)");

    InvitArgs invit;
    auto* c_invit = app.add_subcommand("invit", "eigenvectors by inverse iteration");
    add_matrix_flags(c_invit, invit.src);
    add_tiling_flags(c_invit, invit.tiling);
    c_invit->add_option("--select", invit.select, "which eigenvalues")
        ->check(CLI::IsMember({"all", "real", "complex", "file"}));
    c_invit->add_option("--eigenvalues", invit.eigenvalues_file, "eigenvalue file, one 're [im]' per line");
    c_invit->add_option("--select-file", invit.select_file, "explicit selection for --select file");
    c_invit->add_option("--wmax", invit.wmax, "cap on reals held in cross-over columns (0: none)");
    c_invit->add_option("--max-restarts", invit.max_restarts);
    c_invit->add_option("-o,--out", invit.out, "CSV output (default stdout)");

    BenchArgs bench;
    bench.src.n = 1024;
    auto* c_bench = app.add_subcommand("bench", "per-kernel timings, worker sweep and flop counts");
    add_matrix_flags(c_bench, bench.src);
    add_tiling_flags(c_bench, bench.tiling);
    c_bench->add_option("--shifts", bench.shifts, "number of shifts")->check(CLI::PositiveNumber);
    c_bench->add_flag("--complex", bench.complex_shifts, "complex shifts");
    c_bench->add_option("--workers-sweep", bench.sweep, "comma-separated worker counts, 'max' allowed");
    c_bench->add_flag("--henry", bench.henry, "add a row for the per-shift baseline");
    c_bench->add_option("--repeat", bench.repeat, "runs per worker count")->check(CLI::PositiveNumber);
    c_bench->add_option("-o,--out", bench.out, "CSV output (default stdout)");

    bool quick = false, corrupt = false;
    auto* c_verify = app.add_subcommand("verify", "run the property suite");
    c_verify->add_flag("--quick", quick, "small subset, a few seconds");
    c_verify->add_flag("--corrupt-givens", corrupt, "test hook: flip rotation signs before checking")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*c_gen) return cmd_gen(gen);
        if (*c_solve) return cmd_solve(solve);
        if (*c_invit) return cmd_invit(invit);
        if (*c_bench) return cmd_bench(bench);
        return run_verify(quick, corrupt);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "hsrq: %s\n", e.what());
        return exit_usage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "hsrq: %s\n", e.what());
        return exit_usage;
    } catch (const SingularError& e) {
        std::fprintf(stderr, "hsrq: %s\n", e.what());
        return exit_numerical;
    } catch (const StructureError& e) {
        std::fprintf(stderr, "hsrq: %s\n", e.what());
        return exit_numerical;
    } catch (const TaskFailure& e) {
        std::fprintf(stderr, "hsrq: %s\n", e.what());
        return exit_numerical;
    } catch (const Error& e) { // unreadable or malformed files
        std::fprintf(stderr, "hsrq: %s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "hsrq: %s\n", e.what());
        return exit_numerical;
    }
}
