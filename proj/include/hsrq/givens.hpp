#pragma once

#include <array>
#include <utility>

#include "hsrq/matrix.hpp"

namespace hsrq {

// Acting on a row pair from the right: [a b] * [[c, -s], [s, c]] = [0 phi].
// Convention: c = b/r, s = -a/r, phi = r = hypot(a, b).
struct RealRotation {
    double c = 1.0;
    double s = 0.0;
    double phi = 0.0;
    bool degenerate = false;
};

// Complex cosine, real sine: [a v] * [[c, -s], [s, conj(c)]] = [0 phi] with a real.
// Convention: c = v/r, s = -a/r, phi = r (real, stored as complex).
struct ComplexRotation {
    complex c{1.0, 0.0};
    double s = 0.0;
    complex phi{0.0, 0.0};
    bool degenerate = false;
};

RealRotation make_real(double a, double b);
ComplexRotation make_complex(double a, complex v);

// Compact storage: one real per real rotation, two per complex rotation. The stored
// component is whichever of c, s is smaller in magnitude; the interval the code falls in
// records which one it is and the sign of the other.
double compact_encode(const RealRotation& r);
RealRotation compact_decode(double t);
std::array<double, 2> compact_encode(const ComplexRotation& r);
ComplexRotation compact_decode(std::array<double, 2> t);

// Rotates a column pair from the left: (c u - s v, s u + conj(c) v).
inline std::pair<double, double> apply_pair(const RealRotation& r, double u, double v) {
    return {r.c * u - r.s * v, r.s * u + r.c * v};
}
inline std::pair<complex, complex> apply_pair(const ComplexRotation& r, complex u, complex v) {
    return {r.c * u - r.s * v, r.s * u + std::conj(r.c) * v};
}

} // namespace hsrq
