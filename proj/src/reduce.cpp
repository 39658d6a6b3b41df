#include <cassert>
#include <utility>
#include <vector>

#include "detail.hpp"
#include "hsrq/errors.hpp"
#include "hsrq/reduce.hpp"
#include "hsrq/scheduler.hpp"

namespace hsrq {

namespace {

void check_diag_shapes(ConstView h_diag, ConstView right, std::size_t w, std::size_t width,
                       const RotationSlice<double>& rot) {
    const std::size_t k = right.rows();
    if (k == 0 || h_diag.rows() != k || h_diag.cols() + 1 != k || right.cols() != width * w ||
        rot.s.rows() != k || rot.s.cols() != w)
        throw ConfigError("reduce_diag: inconsistent slice shapes");
}

void check_offdiag_shapes(ConstView h_tile, ConstView right, std::size_t w, std::size_t width,
                          const RotationSlice<const double>& rot, View left) {
    if (right.rows() != h_tile.rows() || left.rows() != h_tile.rows() || right.cols() != width * w ||
        left.cols() != width * w || rot.s.rows() != h_tile.cols() || rot.s.cols() != w)
        throw ConfigError("reduce_offdiag: inconsistent slice shapes");
}

[[noreturn]] void degenerate(const KernelContext& ctx, std::size_t row, std::size_t l) {
    throw StructureError("degenerate rotation, both pivots zero", ctx.row_origin + row, ctx.shift_origin + l);
}

template <bool HasLeft>
void reduce_diag_real(ConstView hd, const double* h_left, std::span<const double> shifts, ConstView right,
                      RotationSlice<double> rot, const KernelContext& ctx) {
    const std::size_t w = shifts.size();
    check_diag_shapes(hd, right, w, 1, rot);
    const std::size_t k = right.rows();
    std::vector<double> v(k);
    std::uint64_t flops = 0;
    for (std::size_t l = 0; l < w; ++l) {
        const double lambda = shifts[l];
        std::copy(right.col(l), right.col(l) + k, v.begin());
        double* c = rot.c_re.col(l);
        double* s = rot.s.col(l);
        for (std::size_t kk = k - 1; kk >= 1; --kk) {
            const RealRotation g = make_real(hd(kk, kk - 1), v[kk]);
            if (g.degenerate) degenerate(ctx, kk, l);
            c[kk] = g.c;
            s[kk] = g.s;
            const double* h = hd.col(kk - 1);
            for (std::size_t i = 0; i + 1 < kk; ++i) v[i] = g.c * h[i] + g.s * v[i];
            v[kk - 1] = g.c * (h[kk - 1] - lambda) + g.s * v[kk - 1];
            flops += 3 * (kk - 1) + 4;
        }
        if constexpr (HasLeft) {
            const RealRotation g = make_real(h_left[0], v[0]);
            if (g.degenerate) degenerate(ctx, 0, l);
            c[0] = g.c;
            s[0] = g.s;
        } else {
            c[0] = 1.0;
            s[0] = 0.0;
        }
    }
    ctx.count(KernelKind::ReduceDiag, flops, w);
}

// Mixed real-complex form: the real H column scales the real and imaginary parts of the
// running column separately.
template <bool HasLeft>
void reduce_diag_complex(ConstView hd, const double* h_left, std::span<const complex> shifts, ConstView right,
                         RotationSlice<double> rot, const KernelContext& ctx) {
    const std::size_t w = shifts.size();
    check_diag_shapes(hd, right, w, 2, rot);
    const std::size_t k = right.rows();
    std::vector<double> vr(k), vi(k);
    std::uint64_t flops = 0;
    for (std::size_t l = 0; l < w; ++l) {
        const double lr = shifts[l].real(), li = shifts[l].imag();
        std::copy(right.col(2 * l), right.col(2 * l) + k, vr.begin());
        std::copy(right.col(2 * l + 1), right.col(2 * l + 1) + k, vi.begin());
        double* cre = rot.c_re.col(l);
        double* cim = rot.c_im.col(l);
        double* s = rot.s.col(l);
        for (std::size_t kk = k - 1; kk >= 1; --kk) {
            const ComplexRotation g = make_complex(hd(kk, kk - 1), {vr[kk], vi[kk]});
            if (g.degenerate) degenerate(ctx, kk, l);
            const double cr = g.c.real(), ci = g.c.imag(), sn = g.s;
            cre[kk] = cr;
            cim[kk] = ci;
            s[kk] = sn;
            const double* h = hd.col(kk - 1);
            for (std::size_t i = 0; i + 1 < kk; ++i) {
                vr[i] = cr * h[i] + sn * vr[i];
                vi[i] = ci * h[i] + sn * vi[i];
            }
            const double tr = h[kk - 1] - lr, ti = -li;
            const double nr = (cr * tr - ci * ti) + sn * vr[kk - 1];
            const double ni = (cr * ti + ci * tr) + sn * vi[kk - 1];
            vr[kk - 1] = nr;
            vi[kk - 1] = ni;
            flops += 6 * (kk - 1) + 11;
        }
        if constexpr (HasLeft) {
            const ComplexRotation g = make_complex(h_left[0], {vr[0], vi[0]});
            if (g.degenerate) degenerate(ctx, 0, l);
            cre[0] = g.c.real();
            cim[0] = g.c.imag();
            s[0] = g.s;
        } else {
            cre[0] = 1.0;
            cim[0] = 0.0;
            s[0] = 0.0;
        }
    }
    ctx.count(KernelKind::ReduceDiag, flops, w);
}

template <bool Shifted>
void reduce_offdiag_real(ConstView ht, ConstView right, const double* shifts, std::size_t w,
                         RotationSlice<const double> rot, View left, const KernelContext& ctx) {
    check_offdiag_shapes(ht, right, w, 1, rot, left);
    const std::size_t m = ht.rows(), k = ht.cols();
    std::uint64_t flops = 0;
    for (std::size_t l = 0; l < w; ++l) {
        double* v = left.col(l);
        std::copy(right.col(l), right.col(l) + m, v);
        const double* c = rot.c_re.col(l);
        const double* s = rot.s.col(l);
        for (std::size_t kk = k - 1; kk >= 1; --kk) {
            const double* h = ht.col(kk);
            const double cc = c[kk], ss = s[kk];
            for (std::size_t i = 0; i < m; ++i) v[i] = cc * h[i] + ss * v[i];
        }
        const double* h = ht.col(0);
        for (std::size_t i = 0; i + 1 < m; ++i) v[i] = c[0] * h[i] + s[0] * v[i];
        if constexpr (Shifted) {
            v[m - 1] = c[0] * (h[m - 1] - shifts[l]) + s[0] * v[m - 1];
        } else {
            v[m - 1] = c[0] * h[m - 1] + s[0] * v[m - 1];
        }
        flops += 3 * m * k + (Shifted ? 1 : 0);
    }
    ctx.count(KernelKind::ReduceOffdiag, flops, w);
}

template <bool Shifted>
void reduce_offdiag_complex(ConstView ht, ConstView right, const complex* shifts, std::size_t w,
                            RotationSlice<const double> rot, View left, const KernelContext& ctx) {
    check_offdiag_shapes(ht, right, w, 2, rot, left);
    const std::size_t m = ht.rows(), k = ht.cols();
    std::uint64_t flops = 0;
    for (std::size_t l = 0; l < w; ++l) {
        double* vr = left.col(2 * l);
        double* vi = left.col(2 * l + 1);
        std::copy(right.col(2 * l), right.col(2 * l) + m, vr);
        std::copy(right.col(2 * l + 1), right.col(2 * l + 1) + m, vi);
        const double* cre = rot.c_re.col(l);
        const double* cim = rot.c_im.col(l);
        const double* s = rot.s.col(l);
        for (std::size_t kk = k - 1; kk >= 1; --kk) {
            const double* h = ht.col(kk);
            const double cr = cre[kk], ci = cim[kk], sn = s[kk];
            for (std::size_t i = 0; i < m; ++i) {
                vr[i] = cr * h[i] + sn * vr[i];
                vi[i] = ci * h[i] + sn * vi[i];
            }
        }
        const double* h = ht.col(0);
        const double cr = cre[0], ci = cim[0], sn = s[0];
        for (std::size_t i = 0; i + 1 < m; ++i) {
            vr[i] = cr * h[i] + sn * vr[i];
            vi[i] = ci * h[i] + sn * vi[i];
        }
        if constexpr (Shifted) {
            const double tr = h[m - 1] - shifts[l].real(), ti = -shifts[l].imag();
            const double nr = (cr * tr - ci * ti) + sn * vr[m - 1];
            const double ni = (cr * ti + ci * tr) + sn * vi[m - 1];
            vr[m - 1] = nr;
            vi[m - 1] = ni;
        } else {
            vr[m - 1] = cr * h[m - 1] + sn * vr[m - 1];
            vi[m - 1] = ci * h[m - 1] + sn * vi[m - 1];
        }
        flops += 6 * m * k + (Shifted ? 6 : 0);
    }
    ctx.count(KernelKind::ReduceOffdiag, flops, w);
}

} // namespace

void reduce_diag(ConstView h_diag, std::span<const double> h_left, std::span<const double> shifts,
                 ConstView right, RotationSlice<double> rot, const KernelContext& ctx) {
    if (h_left.size() != right.rows()) throw ConfigError("reduce_diag: left column length mismatch");
    reduce_diag_real<true>(h_diag, h_left.data(), shifts, right, rot, ctx);
}

void reduce_diag(ConstView h_diag, ZeroColumn, std::span<const double> shifts, ConstView right,
                 RotationSlice<double> rot, const KernelContext& ctx) {
    reduce_diag_real<false>(h_diag, nullptr, shifts, right, rot, ctx);
}

void creduce_diag(ConstView h_diag, std::span<const double> h_left, std::span<const complex> shifts,
                  ConstView right, RotationSlice<double> rot, const KernelContext& ctx) {
    if (h_left.size() != right.rows()) throw ConfigError("creduce_diag: left column length mismatch");
    reduce_diag_complex<true>(h_diag, h_left.data(), shifts, right, rot, ctx);
}

void creduce_diag(ConstView h_diag, ZeroColumn, std::span<const complex> shifts, ConstView right,
                  RotationSlice<double> rot, const KernelContext& ctx) {
    reduce_diag_complex<false>(h_diag, nullptr, shifts, right, rot, ctx);
}

void reduce_offdiag(ConstView h_tile, ConstView right, std::span<const double> shifts,
                    RotationSlice<const double> rot, View left, const KernelContext& ctx) {
    reduce_offdiag_real<true>(h_tile, right, shifts.data(), shifts.size(), rot, left, ctx);
}

void reduce_offdiag(ConstView h_tile, ConstView right, ZeroShift, RotationSlice<const double> rot, View left,
                    const KernelContext& ctx) {
    reduce_offdiag_real<false>(h_tile, right, nullptr, rot.s.cols(), rot, left, ctx);
}

void creduce_offdiag(ConstView h_tile, ConstView right, std::span<const complex> shifts,
                     RotationSlice<const double> rot, View left, const KernelContext& ctx) {
    reduce_offdiag_complex<true>(h_tile, right, shifts.data(), shifts.size(), rot, left, ctx);
}

void creduce_offdiag(ConstView h_tile, ConstView right, ZeroShift, RotationSlice<const double> rot, View left,
                     const KernelContext& ctx) {
    reduce_offdiag_complex<false>(h_tile, right, nullptr, rot.s.cols(), rot, left, ctx);
}

// ---------------------------------------------------------------------------------

Reduction tiled_reduce(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts,
                       const ExecutionOptions& opts, std::vector<double> workspace) {
    const std::size_t n = h.order();
    if (grid.extent() != n) throw ConfigError("tile grid does not match the matrix order");
    const Arithmetic arith = shifts.arithmetic();
    const bool cplx = arith == Arithmetic::Complex;
    const std::size_t N = grid.count();
    Reduction red{GivensTable(n, shifts.size(), arith),
                  CrossoverSet(grid, shifts.size(), arith, std::move(workspace))};
    const ConstView hv = h.view();

    auto run = [&](const TaskNode& task) {
        const Range L = shifts.batch(task.batch);
        const Range J = grid[task.tile_j];
        const KernelContext ctx{opts.flops, J.begin, L.begin};

        if (task.kind == TaskKind::ReduceDiag) {
            if (task.tile_j == N - 1) {
                // Last column of H, shifted at the bottom entry, seeds the sweep.
                View last = red.crossover.slice(N - 1, {0, n}, L);
                for (std::size_t l = 0; l < L.size(); ++l) {
                    if (cplx) {
                        const complex lambda = shifts.complex_values()[L.begin + l];
                        std::copy(h.dense().col(n - 1).begin(), h.dense().col(n - 1).end(), last.col(2 * l));
                        std::fill(last.col(2 * l + 1), last.col(2 * l + 1) + n, 0.0);
                        last(n - 1, 2 * l) -= lambda.real();
                        last(n - 1, 2 * l + 1) -= lambda.imag();
                    } else {
                        std::copy(h.dense().col(n - 1).begin(), h.dense().col(n - 1).end(), last.col(l));
                        last(n - 1, l) -= shifts.real_values()[L.begin + l];
                    }
                }
            }
            const ConstView hd = hv.block(J, {J.begin, J.end - 1});
            const ConstView right = std::as_const(red.crossover).slice(task.tile_j, J, L);
            const RotationSlice<double> rot = red.rotations.slice(J, L);
            detail::timed(opts.times, KernelKind::ReduceDiag, [&] {
                if (task.tile_j == 0) {
                    if (cplx)
                        creduce_diag(hd, zero_column, shifts.complex_values(L), right, rot, ctx);
                    else
                        reduce_diag(hd, zero_column, shifts.real_values(L), right, rot, ctx);
                } else {
                    const auto left = detail::column_part(hv, J.begin - 1, J);
                    if (cplx)
                        creduce_diag(hd, left, shifts.complex_values(L), right, rot, ctx);
                    else
                        reduce_diag(hd, left, shifts.real_values(L), right, rot, ctx);
                }
            });
            return;
        }

        const Range I = grid[task.tile_i];
        const ConstView ht = hv.block(I, {J.begin - 1, J.end - 1});
        const ConstView right = std::as_const(red.crossover).slice(task.tile_j, I, L);
        const View left = red.crossover.slice(task.tile_j - 1, I, L);
        // The packed cross-over block spans exactly the batch's shifts (one or two reals each).
        assert(right.cols() == reals_per_value(arith) * L.size());
        const RotationSlice<const double> rot = std::as_const(red.rotations).slice(J, L);
        detail::timed(opts.times, KernelKind::ReduceOffdiag, [&] {
            if (task.kind == TaskKind::ReduceOffdiagShifted) {
                if (cplx)
                    creduce_offdiag(ht, right, shifts.complex_values(L), rot, left, ctx);
                else
                    reduce_offdiag(ht, right, shifts.real_values(L), rot, left, ctx);
            } else {
                if (cplx)
                    creduce_offdiag(ht, right, zero_shift, rot, left, ctx);
                else
                    reduce_offdiag(ht, right, zero_shift, rot, left, ctx);
            }
        });
    };

    execute(build_reduce_dag(grid, shifts.batch_count()), opts.workers, run);
    return red;
}

} // namespace hsrq
