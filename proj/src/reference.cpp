#include <algorithm>
#include <cmath>
#include <type_traits>

#include "hsrq/errors.hpp"
#include "hsrq/givens.hpp"
#include "hsrq/reference.hpp"

namespace hsrq {

namespace {

inline double cj(double x) { return x; }
inline complex cj(complex z) { return std::conj(z); }

// Single sweep: rotations are built right to left, each finished column of R is used for
// one substitution step and dropped, then the rotations are applied in ascending order.
template <class T>
std::vector<T> henry_impl(const HessenbergMatrix& h, T lambda, std::span<const T> b, HenryTrace* trace,
                          FlopCounters* flops) {
    constexpr bool cplx = std::is_same_v<T, complex>;
    const std::size_t n = h.order();
    if (b.size() != n) throw ConfigError("henry_rq_solve: right-hand side length mismatch");
    std::vector<T> v(n), x(b.begin(), b.end());
    std::vector<T> cs(n, T(1.0));
    std::vector<double> ss(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i] = T(h(i, n - 1));
    v[n - 1] -= lambda;

    std::uint64_t count = 0;
    for (std::size_t k = n - 1; k >= 1; --k) {
        T c;
        double s, phi;
        if constexpr (cplx) {
            const ComplexRotation g = make_complex(h(k, k - 1), v[k]);
            if (g.degenerate) throw SingularError(k, 0);
            c = g.c;
            s = g.s;
            phi = g.phi.real();
        } else {
            const RealRotation g = make_real(h(k, k - 1), v[k]);
            if (g.degenerate) throw SingularError(k, 0);
            c = g.c;
            s = g.s;
            phi = g.phi;
        }
        cs[k] = c;
        ss[k] = s;
        x[k] = x[k] / phi;
        const T tau1 = s * x[k];
        const T tau2 = cj(c) * x[k];
        for (std::size_t i = 0; i + 1 < k; ++i) {
            const double hi = h(i, k - 1);
            x[i] = x[i] - tau2 * v[i] + tau1 * hi;
            v[i] = c * hi + s * v[i];
        }
        const T t = T(h(k - 1, k - 1)) - lambda;
        x[k - 1] = x[k - 1] - tau2 * v[k - 1] + tau1 * t;
        v[k - 1] = c * t + s * v[k - 1];
        count += cplx ? 14 * (k - 1) + 30 : 7 * (k - 1) + 12;
    }
    if (v[0] == T{}) throw SingularError(0, 0);
    T tau1 = x[0] / v[0];
    for (std::size_t k = 1; k < n; ++k) {
        const T tau2 = x[k];
        x[k - 1] = cs[k] * tau1 - ss[k] * tau2;
        tau1 = ss[k] * tau1 + cj(cs[k]) * tau2;
    }
    x[n - 1] = tau1;
    count += (cplx ? 20 : 6) * (n - 1);

    if (trace) {
        trace->c.assign(cs.begin(), cs.end());
        trace->s = std::move(ss);
    }
    if (flops) flops->record(KernelKind::Solve, count, 1);
    return x;
}

template <class T>
LuInvitResult<T> lu_invit_impl(const HessenbergMatrix& h, T lambda, std::span<const T> b) {
    const std::size_t n = h.order();
    if (b.size() != n) throw ConfigError("hessenberg_lu_invit: right-hand side length mismatch");
    Matrix<T> u(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < std::min(n, j + 2); ++i) u(i, j) = T(h(i, j));
    for (std::size_t i = 0; i < n; ++i) u(i, i) -= lambda;

    LuInvitResult<T> out;
    out.x.assign(b.begin(), b.end());
    std::vector<T>& y = out.x;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        // Only rows k and k+1 have nonzeros in column k.
        if (std::abs(u(k + 1, k)) > std::abs(u(k, k))) {
            for (std::size_t j = k; j < n; ++j) std::swap(u(k, j), u(k + 1, j));
            std::swap(y[k], y[k + 1]);
            ++out.interchanges;
        }
        if (u(k, k) == T{}) continue; // both zero: column already eliminated
        const T l = u(k + 1, k) / u(k, k);
        u(k + 1, k) = T{};
        for (std::size_t j = k + 1; j < n; ++j) u(k + 1, j) -= l * u(k, j);
        y[k + 1] -= l * y[k];
    }
    const OverflowBudget budget = OverflowBudget::for_tile_rows(1);
    if constexpr (std::is_same_v<T, complex>)
        out.scale = robust_trsv_complex(std::as_const(u).view(), y, budget);
    else
        out.scale = robust_trsv(std::as_const(u).view(), y, budget);
    return out;
}

template <class T>
std::vector<T> dense_impl(Matrix<T> a, std::span<const T> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw ConfigError("dense_solve_oracle: shape mismatch");
    std::vector<T> x(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (a(p, k) == T{}) throw SingularError(k, 0);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(x[k], x[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const T l = a(i, k) / a(k, k);
            if (l == T{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
            x[i] -= l * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        T acc = x[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= a(k, j) * x[j];
        x[k] = acc / a(k, k);
    }
    return x;
}

} // namespace

std::vector<double> henry_rq_solve(const HessenbergMatrix& h, double shift, std::span<const double> b,
                                   HenryTrace* trace, FlopCounters* flops) {
    return henry_impl<double>(h, shift, b, trace, flops);
}

std::vector<complex> henry_rq_solve(const HessenbergMatrix& h, complex shift, std::span<const complex> b,
                                    HenryTrace* trace, FlopCounters* flops) {
    return henry_impl<complex>(h, shift, b, trace, flops);
}

LuInvitResult<double> hessenberg_lu_invit(const HessenbergMatrix& h, double shift, std::span<const double> b) {
    return lu_invit_impl<double>(h, shift, b);
}

LuInvitResult<complex> hessenberg_lu_invit(const HessenbergMatrix& h, complex shift, std::span<const complex> b) {
    return lu_invit_impl<complex>(h, shift, b);
}

std::vector<double> dense_solve_oracle(const RealMatrix& a, std::span<const double> b) {
    return dense_impl<double>(a, b);
}

std::vector<complex> dense_solve_oracle(const ComplexMatrix& a, std::span<const complex> b) {
    return dense_impl<complex>(a, b);
}

} // namespace hsrq
