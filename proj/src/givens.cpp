#include <cmath>

#include "hsrq/givens.hpp"

namespace hsrq {

namespace {

// sqrt(x^2 + y^2 + z^2) after scaling by a power of two so the squares neither
// overflow nor underflow; returns the scaled root and the exponent separately.
struct ScaledRoot {
    double root;
    int exponent;
};

ScaledRoot scaled_root(double x, double y, double z) {
    const double m = std::max({std::abs(x), std::abs(y), std::abs(z)});
    int e = 0;
    std::frexp(m, &e);
    const double u = std::ldexp(x, -e), v = std::ldexp(y, -e), w = std::ldexp(z, -e);
    return {std::sqrt(u * u + v * v + w * w), e};
}

// Inputs in this window square safely.
bool safe_range(double m) { return m > 0x1.0p-500 && m < 0x1.0p+500; }

} // namespace

RealRotation make_real(double a, double b) {
    if (a == 0.0 && b == 0.0) return {1.0, 0.0, 0.0, true};
    if (a == 0.0) return {b > 0.0 ? 1.0 : -1.0, 0.0, std::abs(b), false};
    if (b == 0.0) return {0.0, a > 0.0 ? -1.0 : 1.0, std::abs(a), false};
    const double m = std::max(std::abs(a), std::abs(b));
    if (safe_range(m)) {
        const double r = std::sqrt(a * a + b * b);
        return {b / r, -a / r, r, false};
    }
    auto [root, e] = scaled_root(a, b, 0.0);
    const double u = std::ldexp(a, -e), w = std::ldexp(b, -e);
    return {w / root, -u / root, std::ldexp(root, e), false};
}

ComplexRotation make_complex(double a, complex v) {
    const double vr = v.real(), vi = v.imag();
    if (a == 0.0 && vr == 0.0 && vi == 0.0) return {{1.0, 0.0}, 0.0, {0.0, 0.0}, true};
    const double m = std::max({std::abs(a), std::abs(vr), std::abs(vi)});
    if (safe_range(m)) {
        const double r = std::sqrt(a * a + vr * vr + vi * vi);
        return {{vr / r, vi / r}, -a / r, {r, 0.0}, false};
    }
    auto [root, e] = scaled_root(a, vr, vi);
    const double u = std::ldexp(a, -e);
    return {{std::ldexp(vr, -e) / root, std::ldexp(vi, -e) / root}, -u / root, {std::ldexp(root, e), 0.0},
            false};
}

// Code intervals (|t|):
//   [0, 0.5)    s stored as t = s/2, c > 0
//   [1, 1.5)    s stored as t = sign(s)(1 + |s|/2), c < 0
//   [2, 2.5)    c stored as t = sign(c)(2 + |c|/2), s < 0
//   [2.5, inf]  c stored as t = 2/c, s > 0
// The stored component has magnitude <= 1/sqrt(2); the other is recovered by sqrt(1 - x^2).
double compact_encode(const RealRotation& r) {
    if (std::abs(r.s) < std::abs(r.c)) {
        if (r.c > 0.0) return 0.5 * r.s;
        return std::copysign(1.0 + 0.5 * std::abs(r.s), r.s);
    }
    if (r.s < 0.0) return std::copysign(2.0 + 0.5 * std::abs(r.c), r.c);
    return 2.0 / r.c;
}

RealRotation compact_decode(double t) {
    const double a = std::abs(t);
    if (a < 0.5) {
        const double s = 2.0 * t;
        return {std::sqrt((1.0 - s) * (1.0 + s)), s, 0.0, false};
    }
    if (a < 2.0) {
        const double s = std::copysign(2.0 * (a - 1.0), t);
        return {-std::sqrt((1.0 - s) * (1.0 + s)), s, 0.0, false};
    }
    if (a < 2.5) {
        const double c = std::copysign(2.0 * (a - 2.0), t);
        return {c, -std::sqrt((1.0 - c) * (1.0 + c)), 0.0, false};
    }
    const double c = 2.0 / t;
    return {c, std::sqrt((1.0 - c) * (1.0 + c)), 0.0, false};
}

// Applied twice: once to (|c|, s), once to the phase of c.
std::array<double, 2> compact_encode(const ComplexRotation& r) {
    const double mod = std::abs(r.c);
    const double t0 = compact_encode(RealRotation{mod, r.s, 0.0, false});
    if (mod == 0.0) return {t0, 0.0};
    const double t1 = compact_encode(RealRotation{r.c.real() / mod, r.c.imag() / mod, 0.0, false});
    return {t0, t1};
}

ComplexRotation compact_decode(std::array<double, 2> t) {
    const RealRotation outer = compact_decode(t[0]);
    const RealRotation phase = compact_decode(t[1]);
    return {outer.c * complex(phase.c, phase.s), outer.s, {0.0, 0.0}, false};
}

} // namespace hsrq
