#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hsrq/errors.hpp"
#include "hsrq/overflow.hpp"

namespace hsrq {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Upper bounds used by the triangular solve: for complex values abs1 over- or under-
// estimates the modulus by at most sqrt(2), so products and quotients pick up a factor 2.
constexpr double growth(double) { return 1.0; }
constexpr double growth(complex) { return 2.0; }

template <class T>
void scale_all(std::span<T> x, double xi) {
    for (auto& v : x) v *= xi;
}

template <class T>
double robust_trsv_impl(MatrixView<const T> r, std::span<T> x, const OverflowBudget& budget,
                        std::size_t shift) {
    const std::size_t k = r.rows();
    const double omega = budget.omega;
    const double g = growth(T{});

    std::vector<double> cnorm(k, 0.0);
    for (std::size_t j = 1; j < k; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < j; ++i) m = std::max(m, abs1(r(i, j)));
        cnorm[j] = g * m;
    }

    double gamma = 1.0;
    double xbound = 0.0;
    for (const auto& v : x) xbound = std::max(xbound, abs1(v));
    if (xbound > omega) {
        const double xi = pow2_floor(omega / xbound);
        scale_all(x, xi);
        gamma *= xi;
        xbound *= xi;
    }

    for (std::size_t j = k; j-- > 0;) {
        const T d = r(j, j);
        if (d == T{}) throw SingularError(j, shift);
        const double xi_div = protect_division(abs1(x[j]), abs1(d) / g, budget);
        if (xi_div < 1.0) {
            scale_all(x, xi_div);
            gamma *= xi_div;
            xbound *= xi_div;
        }
        x[j] = x[j] / d;
        if (j == 0) break;

        double xj = abs1(x[j]);
        if (!(xbound + cnorm[j] * xj <= omega)) {
            xbound = 0.0;
            for (std::size_t i = 0; i < j; ++i) xbound = std::max(xbound, abs1(x[i]));
            const double xi = protect_update(xbound, cnorm[j], xj, budget);
            if (xi < 1.0) {
                scale_all(x, xi);
                gamma *= xi;
                xbound *= xi;
                xj *= xi;
            }
        }
        const T xv = x[j];
        const T* col = r.col(j);
        for (std::size_t i = 0; i < j; ++i) x[i] -= xv * col[i];
        xbound += cnorm[j] * xj;
    }
    return gamma;
}

template <class T>
void classical_trsv_impl(MatrixView<const T> r, std::span<T> x, std::size_t shift) {
    for (std::size_t j = r.rows(); j-- > 0;) {
        const T d = r(j, j);
        if (d == T{}) throw SingularError(j, shift);
        x[j] = x[j] / d;
        const T xv = x[j];
        const T* col = r.col(j);
        for (std::size_t i = 0; i < j; ++i) x[i] -= xv * col[i];
    }
}

} // namespace

OverflowBudget OverflowBudget::for_tile_rows(std::size_t tile_rows) {
    const std::size_t b = std::max<std::size_t>(tile_rows, 1);
    return {std::numeric_limits<double>::max() / 2.0 / static_cast<double>(b), b};
}

OverflowBudget OverflowBudget::with_omega(double omega) { return {omega, 1}; }

double pow2_floor(double x) {
    if (!(x > std::numeric_limits<double>::min())) return std::numeric_limits<double>::min();
    int e = 0;
    std::frexp(x, &e);
    return std::ldexp(1.0, e - 1);
}

double protect_update(double bnorm, double hnorm, double xnorm, const OverflowBudget& budget) {
    const double omega = budget.omega;
    if (bnorm <= omega && hnorm * xnorm <= omega - bnorm) return 1.0;
    // xi <= omega / (bnorm + hnorm*xnorm), evaluated with halved terms to stay finite.
    double bound;
    if (xnorm <= 1.0) {
        bound = (0.5 * omega) / (0.5 * bnorm + 0.5 * (hnorm * xnorm));
    } else {
        bound = ((0.5 * omega) / xnorm) / (0.5 * (bnorm / xnorm) + 0.5 * hnorm);
    }
    return std::min(0.5, pow2_floor(bound * (1.0 - 4.0 * eps)));
}

double protect_division(double xabs, double dabs, const OverflowBudget& budget) {
    const double omega = budget.omega;
    if (xabs <= omega * dabs) return 1.0;
    return std::min(0.5, pow2_floor((omega * dabs) / xabs * (1.0 - 4.0 * eps)));
}

double robust_trsv(ConstView r, std::span<double> x, const OverflowBudget& budget, std::size_t shift) {
    return robust_trsv_impl<double>(r, x, budget, shift);
}

double robust_trsv_complex(MatrixView<const complex> r, std::span<complex> x, const OverflowBudget& budget,
                           std::size_t shift) {
    return robust_trsv_impl<complex>(r, x, budget, shift);
}

void classical_trsv(ConstView r, std::span<double> x, std::size_t shift) {
    classical_trsv_impl<double>(r, x, shift);
}

void classical_trsv_complex(MatrixView<const complex> r, std::span<complex> x, std::size_t shift) {
    classical_trsv_impl<complex>(r, x, shift);
}

} // namespace hsrq
