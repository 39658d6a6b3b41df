#include <algorithm>
#include <cmath>
#include <type_traits>
#include <utility>
#include <vector>

#include "detail.hpp"
#include "hsrq/backsolve.hpp"
#include "hsrq/errors.hpp"
#include "hsrq/scheduler.hpp"

namespace hsrq {

namespace {

template <class T>
constexpr bool is_complex_v = std::is_same_v<T, complex>;

template <class T>
constexpr std::size_t reals_of = is_complex_v<T> ? 2 : 1;

inline double cj(double x) { return x; }
inline complex cj(complex z) { return std::conj(z); }

// Operation counts per touched entry, used by the flop counters.
template <class T>
struct Cost {
    static constexpr std::uint64_t sweep = 6; // R entry plus running-column update
    static constexpr std::uint64_t subst = 2;
    static constexpr std::uint64_t divide = 1;
    static constexpr std::uint64_t rotate = 6;
};
template <>
struct Cost<complex> {
    static constexpr std::uint64_t sweep = 20;
    static constexpr std::uint64_t subst = 8;
    static constexpr std::uint64_t divide = 11;
    static constexpr std::uint64_t rotate = 20;
};

template <class T>
void load(ConstView x, std::size_t l, std::vector<T>& out) {
    const std::size_t k = x.rows();
    out.resize(k);
    if constexpr (is_complex_v<T>) {
        const double* re = x.col(2 * l);
        const double* im = x.col(2 * l + 1);
        for (std::size_t i = 0; i < k; ++i) out[i] = {re[i], im[i]};
    } else {
        std::copy(x.col(l), x.col(l) + k, out.begin());
    }
}

template <class T>
void store(View x, std::size_t l, const std::vector<T>& in) {
    const std::size_t k = x.rows();
    if constexpr (is_complex_v<T>) {
        double* re = x.col(2 * l);
        double* im = x.col(2 * l + 1);
        for (std::size_t i = 0; i < k; ++i) {
            re[i] = in[i].real();
            im[i] = in[i].imag();
        }
    } else {
        std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(k), x.col(l));
    }
}

template <class T>
T cosine(const RotationSlice<const double>& rot, std::size_t j, std::size_t l) {
    if constexpr (is_complex_v<T>)
        return {rot.c_re(j, l), rot.c_im(j, l)};
    else
        return rot.c_re(j, l);
}

// Largest abs1 entry of logical column l.
template <class T>
double column_bound(ConstView x, std::size_t l) {
    double m = 0.0;
    if constexpr (is_complex_v<T>) {
        const double* re = x.col(2 * l);
        const double* im = x.col(2 * l + 1);
        for (std::size_t i = 0; i < x.rows(); ++i) m = std::max(m, std::abs(re[i]) + std::abs(im[i]));
    } else {
        const double* v = x.col(l);
        for (std::size_t i = 0; i < x.rows(); ++i) m = std::max(m, std::abs(v[i]));
    }
    return m;
}

template <class T>
void scale_column(View x, std::size_t l, double f) {
    for (std::size_t c = reals_of<T> * l; c < reals_of<T> * (l + 1); ++c) {
        double* v = x.col(c);
        for (std::size_t i = 0; i < x.rows(); ++i) v[i] *= f;
    }
}

// One step of the right-to-left sweep over a diagonal tile: writes column kk of R
// (rows 0..kk) into rc and turns v into the next running column. h is column kk-1 of
// the tile; the shift enters at row kk-1.
template <class T>
void rq_column(const double* h, std::size_t kk, T lambda, T c, double s, T* v, T* rc) {
    const T cc = cj(c);
    for (std::size_t i = 0; i + 1 < kk; ++i) {
        const T t = T(h[i]);
        rc[i] = -s * t + cc * v[i];
        v[i] = c * t + s * v[i];
    }
    const T t = T(h[kk - 1]) - lambda;
    rc[kk - 1] = -s * t + cc * v[kk - 1];
    v[kk - 1] = c * t + s * v[kk - 1];
    rc[kk] = -s * T(h[kk]) + cc * v[kk];
}

template <class T, bool HasLeft>
T corner(const double* h_left, const RotationSlice<const double>& rot, std::size_t l, T v0) {
    if constexpr (HasLeft)
        return -rot.s(0, l) * T(h_left[0]) + cj(cosine<T>(rot, 0, l)) * v0;
    else
        return v0;
}

template <class T>
std::uint64_t solve_flops(std::size_t k) {
    std::uint64_t f = Cost<T>::divide;
    for (std::size_t kk = 1; kk < k; ++kk)
        f += kk * (Cost<T>::sweep + Cost<T>::subst) + Cost<T>::sweep / 2 + reals_of<T> + Cost<T>::divide;
    return f;
}

void check_solve_shapes(ConstView hd, ConstView right, ConstView x, std::size_t w, std::size_t width,
                        const RotationSlice<const double>& rot) {
    const std::size_t k = right.rows();
    if (k == 0 || hd.rows() != k || hd.cols() + 1 != k || right.cols() != width * w || x.rows() != k ||
        x.cols() != width * w || rot.s.rows() != k || rot.s.cols() != w)
        throw ConfigError("solve_tile: inconsistent slice shapes");
}

template <class T, bool HasLeft>
void solve_impl(ConstView hd, const double* h_left, std::span<const T> shifts, ConstView right,
                RotationSlice<const double> rot, View x, const KernelContext& ctx) {
    const std::size_t w = shifts.size();
    check_solve_shapes(hd, right, x, w, reals_of<T>, rot);
    const std::size_t k = right.rows();
    std::vector<T> v, xl, rc(k);
    for (std::size_t l = 0; l < w; ++l) {
        load(right, l, v);
        load(ConstView(x), l, xl);
        for (std::size_t kk = k - 1; kk >= 1; --kk) {
            rq_column<T>(hd.col(kk - 1), kk, shifts[l], cosine<T>(rot, kk, l), rot.s(kk, l), v.data(), rc.data());
            if (rc[kk] == T{}) throw SingularError(ctx.row_origin + kk, ctx.shift_origin + l);
            xl[kk] = xl[kk] / rc[kk];
            const T xv = xl[kk];
            for (std::size_t i = 0; i < kk; ++i) xl[i] -= xv * rc[i];
        }
        const T r00 = corner<T, HasLeft>(h_left, rot, l, v[0]);
        if (r00 == T{}) throw SingularError(ctx.row_origin, ctx.shift_origin + l);
        xl[0] = xl[0] / r00;
        store(x, l, xl);
    }
    ctx.count(KernelKind::Solve, w * solve_flops<T>(k), w);
}

template <class T>
double trsv(MatrixView<const T> r, std::span<T> x, const OverflowBudget& budget, std::size_t shift) {
    if constexpr (is_complex_v<T>)
        return robust_trsv_complex(r, x, budget, shift);
    else
        return robust_trsv(r, x, budget, shift);
}

// Forms the tile's triangular factor explicitly and hands it to the scaled solver. With
// gamma = 1 this performs the same operations in the same order as solve_impl.
template <class T, bool HasLeft>
void rsolve_impl(ConstView hd, const double* h_left, std::span<const T> shifts, ConstView right,
                 RotationSlice<const double> rot, View x, std::span<double> scale, const OverflowBudget& budget,
                 const KernelContext& ctx) {
    const std::size_t w = shifts.size();
    check_solve_shapes(hd, right, x, w, reals_of<T>, rot);
    if (scale.size() != w) throw ConfigError("rsolve_tile: scale length mismatch");
    const std::size_t k = right.rows();
    Matrix<T> r(k, k);
    std::vector<T> v, xl;
    for (std::size_t l = 0; l < w; ++l) {
        load(right, l, v);
        load(ConstView(x), l, xl);
        for (std::size_t kk = k - 1; kk >= 1; --kk)
            rq_column<T>(hd.col(kk - 1), kk, shifts[l], cosine<T>(rot, kk, l), rot.s(kk, l), v.data(),
                         r.data() + kk * k);
        r(0, 0) = corner<T, HasLeft>(h_left, rot, l, v[0]);
        double gamma;
        try {
            gamma = trsv<T>(std::as_const(r).view(), xl, budget, ctx.shift_origin + l);
        } catch (const SingularError& e) {
            throw SingularError(ctx.row_origin + e.index(), e.shift());
        }
        store(x, l, xl);
        scale[l] *= gamma;
        assert(scale[l] > 0.0 && scale[l] <= 1.0);
    }
    ctx.count(KernelKind::Solve, w * solve_flops<T>(k), w);
}

// z <- G_k^T ... G_1^T [0; z] with the leading component dropped (it is s(0) z(0) and is
// handled by the caller).
template <class T>
void rotate_down(std::vector<T>& z, const RotationSlice<const double>& rot, std::size_t l) {
    z[0] = cj(cosine<T>(rot, 0, l)) * z[0];
    for (std::size_t j = 1; j < z.size(); ++j) {
        const T c = cosine<T>(rot, j, l);
        const double s = rot.s(j, l);
        const T t1 = z[j - 1], t2 = z[j];
        z[j - 1] = c * t1 - s * t2;
        z[j] = s * t1 + cj(c) * t2;
    }
}

// b += rho * (h0 - lambda e_m): the left block of the update.
template <class T, bool Shifted>
void add_left_block(View b, std::size_t l, const double* h0, T rho, T lambda) {
    const std::size_t m = b.rows();
    if constexpr (is_complex_v<T>) {
        double* re = b.col(2 * l);
        double* im = b.col(2 * l + 1);
        for (std::size_t i = 0; i < m; ++i) {
            re[i] += rho.real() * h0[i];
            im[i] += rho.imag() * h0[i];
        }
        if constexpr (Shifted) {
            const T d = lambda * rho;
            re[m - 1] -= d.real();
            im[m - 1] -= d.imag();
        }
    } else {
        double* v = b.col(l);
        for (std::size_t i = 0; i < m; ++i) v[i] += rho * h0[i];
        if constexpr (Shifted) v[m - 1] -= lambda * rho;
    }
}

// b -= r * zk: the cross-over block of the update.
template <class T>
void sub_crossover(View b, ConstView right, std::size_t l, T zk) {
    const std::size_t m = b.rows();
    if constexpr (is_complex_v<T>) {
        double* re = b.col(2 * l);
        double* im = b.col(2 * l + 1);
        const double* rr = right.col(2 * l);
        const double* ri = right.col(2 * l + 1);
        for (std::size_t i = 0; i < m; ++i) {
            const T p = T(rr[i], ri[i]) * zk;
            re[i] -= p.real();
            im[i] -= p.imag();
        }
    } else {
        double* v = b.col(l);
        const double* r = right.col(l);
        for (std::size_t i = 0; i < m; ++i) v[i] -= r[i] * zk;
    }
}

void check_update_shapes(ConstView ht, ConstView right, ConstView x_below, std::size_t w, std::size_t width,
                         const RotationSlice<const double>& rot, ConstView b) {
    const std::size_t m = ht.rows(), k = ht.cols();
    if (m == 0 || k == 0 || right.rows() != m || b.rows() != m || x_below.rows() != k ||
        right.cols() != width * w || b.cols() != width * w || x_below.cols() != width * w ||
        rot.s.rows() != k || rot.s.cols() != w)
        throw ConfigError("update_tile: inconsistent slice shapes");
}

template <class T>
std::uint64_t update_flops(std::size_t m, std::size_t k, bool shifted) {
    const std::uint64_t w = reals_of<T>;
    return 2 * m * (k - 1) * w              // block multiply
           + 2 * m * w + Cost<T>::rotate * k // left block and rotations
           + (is_complex_v<T> ? 8 : 2) * m   // cross-over block
           + (shifted ? 2 * w * w : 0);
}

template <class T, bool Shifted>
void update_impl(ConstView ht, ConstView right, ConstView x_below, const T* shifts, std::size_t w,
                 RotationSlice<const double> rot, View b, const KernelContext& ctx) {
    check_update_shapes(ht, right, x_below, w, reals_of<T>, rot, b);
    const std::size_t m = ht.rows(), k = ht.cols();
    RealMatrix z(k, reals_of<T> * w);
    std::vector<T> zl;
    for (std::size_t l = 0; l < w; ++l) {
        load(x_below, l, zl);
        const T rho = rot.s(0, l) * zl[0];
        add_left_block<T, Shifted>(b, l, ht.col(0), rho, Shifted ? shifts[l] : T{});
        rotate_down(zl, rot, l);
        store(z.view(), l, zl);
    }
    if (k > 1) detail::gemm_minus(ht.block(0, 1, m, k - 1), std::as_const(z).view().block(0, 0, k - 1, z.cols()), b);
    for (std::size_t l = 0; l < w; ++l) {
        T zk;
        if constexpr (is_complex_v<T>)
            zk = {z(k - 1, 2 * l), z(k - 1, 2 * l + 1)};
        else
            zk = z(k - 1, l);
        sub_crossover<T>(b, right, l, zk);
    }
    ctx.count(KernelKind::Update, w * update_flops<T>(m, k, Shifted), w);
}

// Robust form. Each of the three linear updates is preceded by a ProtectUpdate guard;
// every factor is a power of two, so with all factors 1 the arithmetic is that of
// update_impl.
template <class T, bool Shifted>
void rupdate_impl(ConstView ht, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                  const T* shifts, std::size_t w, RotationSlice<const double> rot, View b, std::span<double> scale,
                  const OverflowBudget& budget, const KernelContext& ctx) {
    check_update_shapes(ht, right, x_below, w, reals_of<T>, rot, b);
    if (alpha_below.size() != w || scale.size() != w) throw ConfigError("rupdate_tile: scale length mismatch");
    const std::size_t m = ht.rows(), k = ht.cols();

    double hnorm = 0.0; // row-sum norm of the block-multiply operand
    for (std::size_t i = 0; i < m; ++i) {
        double r = 0.0;
        for (std::size_t q = 1; q < k; ++q) r += std::abs(ht(i, q));
        hnorm = std::max(hnorm, r);
    }
    double h0norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) h0norm = std::max(h0norm, std::abs(ht(i, 0)));

    RealMatrix z(k, reals_of<T> * w);
    std::vector<T> zl;
    std::vector<double> delta(w);
    for (std::size_t l = 0; l < w; ++l) {
        const double alpha = alpha_below[l], beta = scale[l];
        const double gamma = std::min(alpha, beta);
        const T lambda = Shifted ? shifts[l] : T{};
        load(x_below, l, zl);
        const T rho_raw = rot.s(0, l) * zl[0];

        // The last row sees h0(m-1) and lambda in sequence; bound both.
        const double tnorm = std::max(h0norm, std::abs(ht(m - 1, 0)) + abs1(lambda));
        const double xi1 = protect_update((gamma / beta) * column_bound<T>(b, l), tnorm,
                                          (gamma / alpha) * abs1(rho_raw), budget);
        double d = xi1 * gamma;
        const double fb = d / beta, fx = d / alpha;
        if (fb != 1.0) scale_column<T>(b, l, fb);
        const T rho = rho_raw * fx;
        add_left_block<T, Shifted>(b, l, ht.col(0), rho, lambda);

        if (fx != 1.0)
            for (auto& v : zl) v *= fx;
        rotate_down(zl, rot, l);

        double znorm = 0.0;
        for (std::size_t i = 0; i + 1 < k; ++i) znorm = std::max(znorm, abs1(zl[i]));
        const double xi2 = protect_update(column_bound<T>(b, l), hnorm, znorm, budget);
        if (xi2 < 1.0) {
            scale_column<T>(b, l, xi2);
            for (auto& v : zl) v *= xi2;
            d *= xi2;
        }
        store(z.view(), l, zl);
        delta[l] = d;
    }
    if (k > 1) detail::gemm_minus(ht.block(0, 1, m, k - 1), std::as_const(z).view().block(0, 0, k - 1, z.cols()), b);
    for (std::size_t l = 0; l < w; ++l) {
        T zk;
        if constexpr (is_complex_v<T>)
            zk = {z(k - 1, 2 * l), z(k - 1, 2 * l + 1)};
        else
            zk = z(k - 1, l);
        const double xi3 = protect_update(column_bound<T>(b, l), column_bound<T>(right, l), abs1(zk), budget);
        if (xi3 < 1.0) {
            scale_column<T>(b, l, xi3);
            zk *= xi3;
            delta[l] *= xi3;
        }
        sub_crossover<T>(b, right, l, zk);
        scale[l] = delta[l];
        assert(scale[l] > 0.0 && scale[l] <= 1.0);
    }
    ctx.count(KernelKind::Update, w * update_flops<T>(m, k, Shifted), w);
}

// x_max and sqrt(sum (x/x_max)^2) over one (possibly complex) column.
struct NormParts {
    double xmax = 0.0;
    double root = 0.0;
};

NormParts norm_parts(std::span<const double> re, std::span<const double> im) {
    NormParts p;
    for (double v : re) p.xmax = std::max(p.xmax, std::abs(v));
    for (double v : im) p.xmax = std::max(p.xmax, std::abs(v));
    if (p.xmax == 0.0) return p;
    double t = 0.0;
    for (double v : re) t += (v / p.xmax) * (v / p.xmax);
    for (double v : im) t += (v / p.xmax) * (v / p.xmax);
    p.root = std::sqrt(t);
    return p;
}

void consistency_scale(std::span<const double> alpha, const TileGrid& grid, double amin, std::span<double> x) {
    for (std::size_t t = 0; t < grid.count(); ++t) {
        const double f = amin / alpha[t];
        if (f == 1.0) continue;
        const Range r = grid[t];
        for (std::size_t i = r.begin; i < r.end; ++i) x[i] *= f;
    }
}

} // namespace

// --- kernel entry points -----------------------------------------------------------

void solve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const double> shifts, ConstView right,
                RotationSlice<const double> rot, View x, const KernelContext& ctx) {
    if (h_left.size() != right.rows()) throw ConfigError("solve_tile: left column length mismatch");
    solve_impl<double, true>(h_diag, h_left.data(), shifts, right, rot, x, ctx);
}
void solve_tile(ConstView h_diag, ZeroColumn, std::span<const double> shifts, ConstView right,
                RotationSlice<const double> rot, View x, const KernelContext& ctx) {
    solve_impl<double, false>(h_diag, nullptr, shifts, right, rot, x, ctx);
}
void csolve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const complex> shifts,
                 ConstView right, RotationSlice<const double> rot, View x, const KernelContext& ctx) {
    if (h_left.size() != right.rows()) throw ConfigError("csolve_tile: left column length mismatch");
    solve_impl<complex, true>(h_diag, h_left.data(), shifts, right, rot, x, ctx);
}
void csolve_tile(ConstView h_diag, ZeroColumn, std::span<const complex> shifts, ConstView right,
                 RotationSlice<const double> rot, View x, const KernelContext& ctx) {
    solve_impl<complex, false>(h_diag, nullptr, shifts, right, rot, x, ctx);
}

void update_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> shifts,
                 RotationSlice<const double> rot, View b, const KernelContext& ctx) {
    update_impl<double, true>(h_tile, right, x_below, shifts.data(), shifts.size(), rot, b, ctx);
}
void update_tile(ConstView h_tile, ConstView right, ConstView x_below, ZeroShift, RotationSlice<const double> rot,
                 View b, const KernelContext& ctx) {
    update_impl<double, false>(h_tile, right, x_below, nullptr, rot.s.cols(), rot, b, ctx);
}
void cupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const complex> shifts,
                  RotationSlice<const double> rot, View b, const KernelContext& ctx) {
    update_impl<complex, true>(h_tile, right, x_below, shifts.data(), shifts.size(), rot, b, ctx);
}
void cupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, ZeroShift, RotationSlice<const double> rot,
                  View b, const KernelContext& ctx) {
    update_impl<complex, false>(h_tile, right, x_below, nullptr, rot.s.cols(), rot, b, ctx);
}

void backtransform(std::span<const double> c, std::span<const double> s, std::span<double> x,
                   const KernelContext& ctx) {
    const std::size_t n = x.size();
    if (n == 0) return;
    double t1 = x[0];
    for (std::size_t k = 1; k < n; ++k) {
        const double t2 = x[k];
        x[k - 1] = c[k] * t1 - s[k] * t2;
        t1 = s[k] * t1 + c[k] * t2;
    }
    x[n - 1] = t1;
    ctx.count(KernelKind::Backtransform, 6 * (n - 1), 1);
}

void cbacktransform(std::span<const double> c_re, std::span<const double> c_im, std::span<const double> s,
                    std::span<double> x_re, std::span<double> x_im, const KernelContext& ctx) {
    const std::size_t n = x_re.size();
    if (n == 0) return;
    complex t1{x_re[0], x_im[0]};
    for (std::size_t k = 1; k < n; ++k) {
        const complex c{c_re[k], c_im[k]};
        const complex t2{x_re[k], x_im[k]};
        const complex out = c * t1 - s[k] * t2;
        x_re[k - 1] = out.real();
        x_im[k - 1] = out.imag();
        t1 = s[k] * t1 + std::conj(c) * t2;
    }
    x_re[n - 1] = t1.real();
    x_im[n - 1] = t1.imag();
    ctx.count(KernelKind::Backtransform, 20 * (n - 1), 1);
}

void rsolve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const double> shifts, ConstView right,
                 RotationSlice<const double> rot, View x, std::span<double> scale, const OverflowBudget& budget,
                 const KernelContext& ctx) {
    if (h_left.size() != right.rows()) throw ConfigError("rsolve_tile: left column length mismatch");
    rsolve_impl<double, true>(h_diag, h_left.data(), shifts, right, rot, x, scale, budget, ctx);
}
void rsolve_tile(ConstView h_diag, ZeroColumn, std::span<const double> shifts, ConstView right,
                 RotationSlice<const double> rot, View x, std::span<double> scale, const OverflowBudget& budget,
                 const KernelContext& ctx) {
    rsolve_impl<double, false>(h_diag, nullptr, shifts, right, rot, x, scale, budget, ctx);
}
void crsolve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const complex> shifts,
                  ConstView right, RotationSlice<const double> rot, View x, std::span<double> scale,
                  const OverflowBudget& budget, const KernelContext& ctx) {
    if (h_left.size() != right.rows()) throw ConfigError("crsolve_tile: left column length mismatch");
    rsolve_impl<complex, true>(h_diag, h_left.data(), shifts, right, rot, x, scale, budget, ctx);
}
void crsolve_tile(ConstView h_diag, ZeroColumn, std::span<const complex> shifts, ConstView right,
                  RotationSlice<const double> rot, View x, std::span<double> scale, const OverflowBudget& budget,
                  const KernelContext& ctx) {
    rsolve_impl<complex, false>(h_diag, nullptr, shifts, right, rot, x, scale, budget, ctx);
}

void rupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                  std::span<const double> shifts, RotationSlice<const double> rot, View b, std::span<double> scale,
                  const OverflowBudget& budget, const KernelContext& ctx) {
    rupdate_impl<double, true>(h_tile, right, x_below, alpha_below, shifts.data(), shifts.size(), rot, b, scale,
                               budget, ctx);
}
void rupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                  ZeroShift, RotationSlice<const double> rot, View b, std::span<double> scale,
                  const OverflowBudget& budget, const KernelContext& ctx) {
    rupdate_impl<double, false>(h_tile, right, x_below, alpha_below, nullptr, rot.s.cols(), rot, b, scale, budget,
                                ctx);
}
void crupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                   std::span<const complex> shifts, RotationSlice<const double> rot, View b,
                   std::span<double> scale, const OverflowBudget& budget, const KernelContext& ctx) {
    rupdate_impl<complex, true>(h_tile, right, x_below, alpha_below, shifts.data(), shifts.size(), rot, b, scale,
                                budget, ctx);
}
void crupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                   ZeroShift, RotationSlice<const double> rot, View b, std::span<double> scale,
                   const OverflowBudget& budget, const KernelContext& ctx) {
    rupdate_impl<complex, false>(h_tile, right, x_below, alpha_below, nullptr, rot.s.cols(), rot, b, scale,
                                 budget, ctx);
}

ScaledNorm rbacktransform(std::span<const double> c, std::span<const double> s, std::span<const double> alpha,
                          const TileGrid& grid, std::span<double> x, bool normalize, const KernelContext& ctx) {
    if (alpha.size() != grid.count() || x.size() != grid.extent())
        throw ConfigError("rbacktransform: scaling factors do not match the grid");
    const double amin = *std::min_element(alpha.begin(), alpha.end());
    consistency_scale(alpha, grid, amin, x);
    const NormParts p = norm_parts(x, {});
    const ScaledNorm norm{p.xmax * p.root, amin};
    if (!normalize || p.xmax == 0.0) {
        backtransform(c, s, x, ctx);
        return norm;
    }
    const std::size_t n = x.size();
    const double inv_root = 1.0 / p.root;
    double t1 = (x[0] / p.xmax) * inv_root;
    for (std::size_t k = 1; k < n; ++k) {
        const double t2 = (x[k] / p.xmax) * inv_root;
        x[k - 1] = c[k] * t1 - s[k] * t2;
        t1 = s[k] * t1 + c[k] * t2;
    }
    x[n - 1] = t1;
    ctx.count(KernelKind::Backtransform, 8 * n, 1);
    return norm;
}

ScaledNorm crbacktransform(std::span<const double> c_re, std::span<const double> c_im, std::span<const double> s,
                           std::span<const double> alpha, const TileGrid& grid, std::span<double> x_re,
                           std::span<double> x_im, bool normalize, const KernelContext& ctx) {
    if (alpha.size() != grid.count() || x_re.size() != grid.extent() || x_im.size() != grid.extent())
        throw ConfigError("crbacktransform: scaling factors do not match the grid");
    const double amin = *std::min_element(alpha.begin(), alpha.end());
    consistency_scale(alpha, grid, amin, x_re);
    consistency_scale(alpha, grid, amin, x_im);
    const NormParts p = norm_parts(x_re, x_im);
    const ScaledNorm norm{p.xmax * p.root, amin};
    if (!normalize || p.xmax == 0.0) {
        cbacktransform(c_re, c_im, s, x_re, x_im, ctx);
        return norm;
    }
    const std::size_t n = x_re.size();
    const double inv_root = 1.0 / p.root;
    auto load_scaled = [&](std::size_t i) {
        return complex((x_re[i] / p.xmax) * inv_root, (x_im[i] / p.xmax) * inv_root);
    };
    complex t1 = load_scaled(0);
    for (std::size_t k = 1; k < n; ++k) {
        const complex c{c_re[k], c_im[k]};
        const complex t2 = load_scaled(k);
        const complex out = c * t1 - s[k] * t2;
        x_re[k - 1] = out.real();
        x_im[k - 1] = out.imag();
        t1 = s[k] * t1 + std::conj(c) * t2;
    }
    x_re[n - 1] = t1.real();
    x_im[n - 1] = t1.imag();
    ctx.count(KernelKind::Backtransform, 24 * n, 1);
    return norm;
}

// --- tiled drivers -----------------------------------------------------------------

namespace {

// Shared task dispatch for the plain and the robust sweep. `alpha` is null for the
// plain sweep. `finish` runs inside the merged top-left task once tile 0 is solved.
class SolveSweep {
public:
    SolveSweep(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts, const Reduction& red,
               RealMatrix& x, ScalingMatrix* alpha, const ExecutionOptions& opts)
        : h_(h), grid_(grid), shifts_(shifts), red_(red), x_(x), alpha_(alpha), opts_(opts),
          budget_(OverflowBudget::for_tile_rows(grid.block())) {}

    template <class Finish>
    void run(Finish&& finish) {
        const TaskGraph graph = build_solve_dag(grid_, shifts_.batch_count());
        execute(graph, opts_.workers, [&](const TaskNode& task) {
            const Range L = shifts_.batch(task.batch);
            switch (task.kind) {
            case TaskKind::SolveTile: solve(task.tile_j, L); break;
            case TaskKind::UpdateShifted:
            case TaskKind::UpdateFar: update(task.tile_i, task.tile_j, L, task.kind == TaskKind::UpdateShifted); break;
            case TaskKind::MergedSolveBacktransform:
                solve(0, L);
                detail::timed(opts_.times, KernelKind::Backtransform, [&] { finish(L); });
                break;
            default: throw Error("unexpected task in the solve graph");
            }
        });
    }

private:
    std::size_t width() const { return reals_per_value(shifts_.arithmetic()); }
    bool complex_shifts() const { return shifts_.arithmetic() == Arithmetic::Complex; }

    View x_block(Range rows, Range batch) {
        return x_.view().block(rows.begin, width() * batch.begin, rows.size(), width() * batch.size());
    }
    std::vector<double> gather(std::size_t tile, Range batch) const {
        std::vector<double> v(batch.size());
        for (std::size_t l = 0; l < batch.size(); ++l) v[l] = (*alpha_)(tile, batch.begin + l);
        return v;
    }
    void scatter(std::size_t tile, Range batch, const std::vector<double>& v) {
        for (std::size_t l = 0; l < batch.size(); ++l) (*alpha_)(tile, batch.begin + l) = v[l];
    }

    void solve(std::size_t j, Range L) {
        const Range J = grid_[j];
        const ConstView hd = h_.block(J, {J.begin, J.end - 1});
        const ConstView right = red_.crossover.slice(j, J, L);
        const RotationSlice<const double> rot = red_.rotations.slice(J, L);
        const View x = x_block(J, L);
        const KernelContext ctx{opts_.flops, J.begin, L.begin};
        const bool top = j == 0;
        const auto left = top ? std::span<const double>{} : detail::column_part(h_.view(), J.begin - 1, J);
        const auto rs = shifts_.real_values(complex_shifts() ? Range{} : L);
        const auto cs = shifts_.complex_values(complex_shifts() ? L : Range{});

        detail::timed(opts_.times, KernelKind::Solve, [&] {
            if (!alpha_) {
                if (complex_shifts()) {
                    top ? csolve_tile(hd, zero_column, cs, right, rot, x, ctx)
                        : csolve_tile(hd, left, cs, right, rot, x, ctx);
                } else {
                    top ? solve_tile(hd, zero_column, rs, right, rot, x, ctx)
                        : solve_tile(hd, left, rs, right, rot, x, ctx);
                }
                return;
            }
            std::vector<double> scale = gather(j, L);
            if (complex_shifts()) {
                top ? crsolve_tile(hd, zero_column, cs, right, rot, x, scale, budget_, ctx)
                    : crsolve_tile(hd, left, cs, right, rot, x, scale, budget_, ctx);
            } else {
                top ? rsolve_tile(hd, zero_column, rs, right, rot, x, scale, budget_, ctx)
                    : rsolve_tile(hd, left, rs, right, rot, x, scale, budget_, ctx);
            }
            scatter(j, L, scale);
        });
    }

    void update(std::size_t i, std::size_t j, Range L, bool shifted) {
        const Range I = grid_[i], J = grid_[j];
        const ConstView ht = h_.block(I, {J.begin - 1, J.end - 1});
        const ConstView right = red_.crossover.slice(j, I, L);
        const ConstView below = x_block(J, L);
        const RotationSlice<const double> rot = red_.rotations.slice(J, L);
        const View b = x_block(I, L);
        const KernelContext ctx{opts_.flops, I.begin, L.begin};
        const auto rs = shifts_.real_values(complex_shifts() ? Range{} : L);
        const auto cs = shifts_.complex_values(complex_shifts() ? L : Range{});

        detail::timed(opts_.times, KernelKind::Update, [&] {
            if (!alpha_) {
                if (complex_shifts()) {
                    shifted ? cupdate_tile(ht, right, below, cs, rot, b, ctx)
                            : cupdate_tile(ht, right, below, zero_shift, rot, b, ctx);
                } else {
                    shifted ? update_tile(ht, right, below, rs, rot, b, ctx)
                            : update_tile(ht, right, below, zero_shift, rot, b, ctx);
                }
                return;
            }
            const std::vector<double> alpha_below = gather(j, L);
            std::vector<double> scale = gather(i, L);
            if (complex_shifts()) {
                shifted ? crupdate_tile(ht, right, below, alpha_below, cs, rot, b, scale, budget_, ctx)
                        : crupdate_tile(ht, right, below, alpha_below, zero_shift, rot, b, scale, budget_, ctx);
            } else {
                shifted ? rupdate_tile(ht, right, below, alpha_below, rs, rot, b, scale, budget_, ctx)
                        : rupdate_tile(ht, right, below, alpha_below, zero_shift, rot, b, scale, budget_, ctx);
            }
            scatter(i, L, scale);
        });
    }

    const HessenbergMatrix& h_;
    const TileGrid& grid_;
    const ShiftBatch& shifts_;
    const Reduction& red_;
    RealMatrix& x_;
    ScalingMatrix* alpha_;
    const ExecutionOptions& opts_;
    OverflowBudget budget_;
};

void check_solve_inputs(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts,
                        const Reduction& red, const RealMatrix& b) {
    const std::size_t n = h.order();
    if (grid.extent() != n) throw ConfigError("tile grid does not match the matrix order");
    if (red.rotations.rows() != n || red.rotations.shifts() != shifts.size() ||
        red.rotations.arithmetic() != shifts.arithmetic())
        throw ConfigError("reduction does not match the shifts");
    if (b.rows() != n || b.cols() != reals_per_value(shifts.arithmetic()) * shifts.size())
        throw ConfigError("right-hand side shape does not match the shifts");
}

std::span<const double> column_of(const RealMatrix& a, std::size_t j) { return a.col(j); }

} // namespace

RealMatrix tiled_solve(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts,
                       const Reduction& red, const RealMatrix& b, const ExecutionOptions& opts) {
    check_solve_inputs(h, grid, shifts, red, b);
    RealMatrix x = b;
    const GivensTable& g = red.rotations;
    SolveSweep sweep(h, grid, shifts, red, x, nullptr, opts);
    sweep.run([&](Range L) {
        for (std::size_t l = L.begin; l < L.end; ++l) {
            const KernelContext ctx{opts.flops, 0, l};
            if (shifts.arithmetic() == Arithmetic::Complex)
                cbacktransform(column_of(g.c(), l), column_of(g.c_im(), l), column_of(g.s(), l), x.col(2 * l),
                               x.col(2 * l + 1), ctx);
            else
                backtransform(column_of(g.c(), l), column_of(g.s(), l), x.col(l), ctx);
        }
    });
    return x;
}

SolutionBlock robust_tiled_solve(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts,
                                 const Reduction& red, const RealMatrix& b, SolveMode mode,
                                 const ExecutionOptions& opts) {
    check_solve_inputs(h, grid, shifts, red, b);
    const std::size_t m = shifts.size();
    SolutionBlock out;
    out.arithmetic = shifts.arithmetic();
    out.x = b;
    out.scale.assign(m, 1.0);
    out.norms.assign(m, ScaledNorm{});
    ScalingMatrix alpha(grid.count(), m);
    const GivensTable& g = red.rotations;
    const bool normalize = mode == SolveMode::Eigenvector;

    SolveSweep sweep(h, grid, shifts, red, out.x, &alpha, opts);
    sweep.run([&](Range L) {
        for (std::size_t l = L.begin; l < L.end; ++l) {
            const KernelContext ctx{opts.flops, 0, l};
            ScaledNorm nrm;
            if (shifts.arithmetic() == Arithmetic::Complex)
                nrm = crbacktransform(column_of(g.c(), l), column_of(g.c_im(), l), column_of(g.s(), l),
                                      alpha.column(l), grid, out.x.col(2 * l), out.x.col(2 * l + 1), normalize, ctx);
            else
                nrm = rbacktransform(column_of(g.c(), l), column_of(g.s(), l), alpha.column(l), grid, out.x.col(l),
                                     normalize, ctx);
            out.norms[l] = nrm;
            out.scale[l] = nrm.alpha;
        }
    });
    out.segment_scales = std::move(alpha);
    return out;
}

namespace {

template <class T>
SolutionBlock hsrq3_impl(const HessenbergMatrix& h, std::span<const T> values, const RealMatrix& b,
                         const SolverOptions& opts) {
    const std::size_t n = h.order();
    if (opts.tile_rows == 0 || opts.batch_width == 0) throw ConfigError("tile sizes must be positive");
    const TileGrid grid(n, std::min(opts.tile_rows, n));
    const ShiftBatch shifts = [&] {
        if constexpr (is_complex_v<T>)
            return ShiftBatch::complex({values.begin(), values.end()}, opts.batch_width);
        else
            return ShiftBatch::real({values.begin(), values.end()}, opts.batch_width);
    }();
    const ExecutionOptions eo{opts.workers, opts.flops, opts.times};

    std::vector<double> buffer;
    if (opts.workspace) buffer = std::move(*opts.workspace);
    Reduction red = tiled_reduce(h, grid, shifts, eo, std::move(buffer));

    SolutionBlock out;
    if (opts.robust) {
        out = robust_tiled_solve(h, grid, shifts, red, b, opts.mode, eo);
    } else {
        const std::size_t m = values.size();
        out.arithmetic = shifts.arithmetic();
        out.x = tiled_solve(h, grid, shifts, red, b, eo);
        out.segment_scales = ScalingMatrix(grid.count(), m);
        out.scale.assign(m, 1.0);
        out.norms.assign(m, ScaledNorm{});
        for (std::size_t l = 0; l < m; ++l) {
            std::span<double> re = out.x.col(reals_of<T> * l);
            std::span<double> im = is_complex_v<T> ? out.x.col(2 * l + 1) : std::span<double>{};
            const NormParts p = norm_parts(re, im);
            out.norms[l] = {p.xmax * p.root, 1.0};
            if (opts.mode != SolveMode::Eigenvector || p.xmax == 0.0) continue;
            const double inv_root = 1.0 / p.root;
            for (double& v : re) v = (v / p.xmax) * inv_root;
            for (double& v : im) v = (v / p.xmax) * inv_root;
        }
    }
    if (opts.workspace) *opts.workspace = red.crossover.release();
    return out;
}

} // namespace

SolutionBlock dhsrq3(const HessenbergMatrix& h, std::span<const double> shifts, const RealMatrix& b,
                     const SolverOptions& opts) {
    return hsrq3_impl<double>(h, shifts, b, opts);
}

SolutionBlock chsrq3(const HessenbergMatrix& h, std::span<const complex> shifts, const RealMatrix& b,
                     const SolverOptions& opts) {
    return hsrq3_impl<complex>(h, shifts, b, opts);
}

} // namespace hsrq
