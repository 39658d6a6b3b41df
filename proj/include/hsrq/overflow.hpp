#pragma once

#include <span>

#include "hsrq/matrix.hpp"

namespace hsrq {

// Working overflow threshold. omega = (largest finite / 2) / safety_divisor; the
// divisor is the tile height so that a tile's worth of bounded terms still fits.
struct OverflowBudget {
    double omega;
    std::size_t safety_divisor;

    static OverflowBudget for_tile_rows(std::size_t tile_rows);
    static OverflowBudget with_omega(double omega);
};

// Largest power of two <= x, for finite x > 0. Clamped to the smallest normal.
double pow2_floor(double x);

// Power-of-two xi in (0, 1] with xi*bnorm + hnorm*(xi*xnorm) <= omega.
double protect_update(double bnorm, double hnorm, double xnorm, const OverflowBudget& budget);

// Power-of-two xi in (0, 1] such that |xi*x / d| <= omega (division guard).
double protect_division(double xabs, double dabs, const OverflowBudget& budget);

// Solves R x = gamma b in place (b on entry, x on exit) for upper triangular R.
// Column-oriented substitution; the rescaling only kicks in near omega, and with
// gamma = 1 the arithmetic is exactly classical backward substitution.
// `shift` only labels a SingularError.
double robust_trsv(ConstView r, std::span<double> x, const OverflowBudget& budget,
                   std::size_t shift = 0);
double robust_trsv_complex(MatrixView<const complex> r, std::span<complex> x,
                           const OverflowBudget& budget, std::size_t shift = 0);

// Plain column-oriented backward substitution with the same operation order.
void classical_trsv(ConstView r, std::span<double> x, std::size_t shift = 0);
void classical_trsv_complex(MatrixView<const complex> r, std::span<complex> x, std::size_t shift = 0);

inline double abs1(double x) { return x < 0 ? -x : x; }
inline double abs1(complex z) { return abs1(z.real()) + abs1(z.imag()); }

} // namespace hsrq
