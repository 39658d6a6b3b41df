#pragma once

#include <cstdint>
#include <vector>

#include "hsrq/hessenberg.hpp"

namespace hsrq {

// splitmix64; fixtures depend on this exact sequence, so do not swap the generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform on (0, 1].
    double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }
    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform() - 0x1.0p-53); }
    // Standard normal via Box-Muller (std::normal_distribution is not portable bitwise).
    double normal();

private:
    std::uint64_t state_;
};

struct TestProblem {
    HessenbergMatrix h;
    std::vector<complex> eigenvalues;
};

// Quasi-triangular T with eigenvalues k (real blocks first) and k +- ik (2x2 blocks
// [[k, k], [-k, k]]), random strictly upper part in (0, 1], transformed by a random
// Householder reflector and reduced back to Hessenberg form.
TestProblem gen_h1(std::size_t n, double complex_fraction, std::uint64_t seed);

// R Q + 2 I with Q the signed cyclic shift: R diagonal n-i+1 (1-based) with upper entries -n
// (gen_h2, solution growth about C(2n, n)) or 1/2 (gen_h3, benign).
HessenbergMatrix gen_h2(std::size_t n);
HessenbergMatrix gen_h3(std::size_t n);
inline constexpr double h23_shift = 2.0;

// Random unreduced Hessenberg matrix with entries uniform in [-1, 1) and subdiagonal
// magnitudes in [0.5, 1).
HessenbergMatrix random_hessenberg(std::size_t n, std::uint64_t seed);

struct HessenbergReduction {
    RealMatrix h;
    RealMatrix q; // empty unless accumulated
};

// Q^T A Q = H by Householder reflectors.
HessenbergReduction householder_hessenberg(RealMatrix a, bool accumulate_q = true);

} // namespace hsrq
