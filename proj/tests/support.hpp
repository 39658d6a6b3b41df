#pragma once

// Independent helpers for tests: dense arithmetic in std::complex, Eigen for spectra.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "hsrq/hessenberg.hpp"
#include "hsrq/storage.hpp"
#include "hsrq/testprob.hpp"

namespace hsrq::test {

inline constexpr double eps = std::numeric_limits<double>::epsilon();

inline ComplexMatrix shifted(const HessenbergMatrix& h, complex lambda) {
    const std::size_t n = h.order();
    ComplexMatrix a(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, j) = h(i, j);
    for (std::size_t i = 0; i < n; ++i) a(i, i) -= lambda;
    return a;
}

inline double inf_norm(const ComplexMatrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
        best = std::max(best, row);
    }
    return best;
}

inline double max_abs(const std::vector<complex>& x) {
    double m = 0.0;
    for (auto z : x) m = std::max(m, std::abs(z));
    return m;
}

inline double norm2(const std::vector<complex>& x) {
    double s = 0.0;
    for (auto z : x) s += std::norm(z);
    return std::sqrt(s);
}

inline std::vector<complex> matvec(const ComplexMatrix& a, const std::vector<complex>& x) {
    std::vector<complex> y(a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) y[i] += a(i, j) * x[j];
    return y;
}

// max_i |((H - lambda I) x - alpha b)_i|
inline double residual_inf(const HessenbergMatrix& h, complex lambda, const std::vector<complex>& x, double alpha,
                           const std::vector<complex>& b) {
    const auto y = matvec(shifted(h, lambda), x);
    double r = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs(y[i] - alpha * b[i]));
    return r;
}

// ||H x - lambda x||_2
inline double eig_residual(const HessenbergMatrix& h, complex lambda, const std::vector<complex>& x) {
    return norm2(matvec(shifted(h, lambda), x));
}

inline double rel_err(const std::vector<complex>& x, const std::vector<complex>& ref) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - ref[i]));
    return d / max_abs(ref);
}

inline std::vector<complex> spectrum(const HessenbergMatrix& h) {
    const std::size_t n = h.order();
    Eigen::MatrixXd a(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, j) = h(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    std::vector<complex> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    return out;
}

inline double distance_to(const std::vector<complex>& spec, complex z) {
    double d = std::numeric_limits<double>::infinity();
    for (auto e : spec) d = std::min(d, std::abs(e - z));
    return d;
}

// Draws shifts in a box reaching past the spectrum, rejecting ones closer than `gap` to an eigenvalue.
inline std::vector<complex> shifts_away(const std::vector<complex>& spec, std::size_t count, double gap,
                                        bool complex_values, SplitMix64& rng) {
    double radius = 1.0;
    for (auto e : spec) radius = std::max(radius, std::abs(e));
    radius *= 1.5;
    std::vector<complex> out;
    while (out.size() < count) {
        const complex z(rng.uniform(-radius, radius), complex_values ? rng.uniform(-radius, radius) : 0.0);
        if (distance_to(spec, z) >= gap) out.push_back(z);
    }
    return out;
}

// P with (H - lambda_l I) P upper triangular: the product of the recorded rotations,
// each acting on columns (k-1, k) as [u v] <- [u v] [[c, -s], [s, conj(c)]], applied k = n-1 .. 1.
inline ComplexMatrix accumulate_rotations(const GivensTable& t, std::size_t l) {
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

inline std::vector<complex> column_of(const RealMatrix& x, std::size_t l, bool cplx) {
    if (cplx) return complex_column(x, l);
    std::vector<complex> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = x(i, l);
    return out;
}

} // namespace hsrq::test
