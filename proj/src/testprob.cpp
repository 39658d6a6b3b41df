#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsrq/errors.hpp"
#include "hsrq/testprob.hpp"

namespace hsrq {

double SplitMix64::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

// Upper triangular R (1-based: diagonal n+1-i, strictly upper `upper`) times the signed
// cyclic shift Q, plus the shift 2 on the diagonal. Column j of R Q is -R(:, j+1); the last
// column is -R(:, 1).
HessenbergMatrix rq_plus_shift(std::size_t n, double upper) {
    if (n < 2) throw ConfigError("test matrix order must be at least 2");
    auto r = [&](std::size_t i, std::size_t j) -> double {
        if (i == j) return static_cast<double>(n - i);
        return i < j ? upper : 0.0;
    };
    RealMatrix h(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = j + 1 < n ? j + 1 : 0;
        for (std::size_t i = 0; i < n; ++i) h(i, j) = -r(i, src);
        h(j, j) += h23_shift;
    }
    return HessenbergMatrix(std::move(h));
}

} // namespace

HessenbergMatrix gen_h2(std::size_t n) { return rq_plus_shift(n, -static_cast<double>(n)); }

HessenbergMatrix gen_h3(std::size_t n) { return rq_plus_shift(n, 0.5); }

HessenbergMatrix random_hessenberg(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    RealMatrix h(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i <= j && i < n; ++i) h(i, j) = rng.uniform(-1.0, 1.0);
        if (j + 1 < n) {
            const double mag = rng.uniform(0.5, 1.0);
            h(j + 1, j) = rng.uniform() < 0.5 ? -mag : mag;
        }
    }
    return HessenbergMatrix(std::move(h));
}

HessenbergReduction householder_hessenberg(RealMatrix a, bool accumulate_q) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ConfigError("householder_hessenberg: matrix must be square");
    RealMatrix q = accumulate_q ? RealMatrix::identity(n) : RealMatrix{};
    std::vector<double> v(n), w(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t p = k + 1, len = n - p;
        double scale = 0.0;
        for (std::size_t i = p; i < n; ++i) scale = std::max(scale, std::abs(a(i, k)));
        if (scale == 0.0) continue;
        double tail = 0.0;
        for (std::size_t i = p + 1; i < n; ++i) tail += (a(i, k) / scale) * (a(i, k) / scale);
        if (tail == 0.0) continue;

        const double x0 = a(p, k) / scale;
        const double norm = std::sqrt(x0 * x0 + tail);
        const double alpha = x0 >= 0.0 ? -norm : norm;
        v[0] = x0 - alpha;
        for (std::size_t i = 1; i < len; ++i) v[i] = a(p + i, k) / scale;
        double vtv = 0.0;
        for (std::size_t i = 0; i < len; ++i) vtv += v[i] * v[i];
        const double beta = 2.0 / vtv;

        // Left: A(p:n, k:n) -= beta v (v^T A(p:n, k:n)).
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < len; ++i) dot += v[i] * a(p + i, j);
            dot *= beta;
            for (std::size_t i = 0; i < len; ++i) a(p + i, j) -= dot * v[i];
        }
        // Right: A(0:n, p:n) -= beta (A(0:n, p:n) v) v^T.
        for (std::size_t i = 0; i < n; ++i) w[i] = 0.0;
        for (std::size_t j = 0; j < len; ++j)
            for (std::size_t i = 0; i < n; ++i) w[i] += a(i, p + j) * v[j];
        for (std::size_t j = 0; j < len; ++j)
            for (std::size_t i = 0; i < n; ++i) a(i, p + j) -= beta * w[i] * v[j];
        a(p, k) = alpha * scale;
        for (std::size_t i = p + 1; i < n; ++i) a(i, k) = 0.0;

        if (accumulate_q) {
            for (std::size_t i = 0; i < n; ++i) w[i] = 0.0;
            for (std::size_t j = 0; j < len; ++j)
                for (std::size_t i = 0; i < n; ++i) w[i] += q(i, p + j) * v[j];
            for (std::size_t j = 0; j < len; ++j)
                for (std::size_t i = 0; i < n; ++i) q(i, p + j) -= beta * w[i] * v[j];
        }
    }
    return {std::move(a), std::move(q)};
}

TestProblem gen_h1(std::size_t n, double complex_fraction, std::uint64_t seed) {
    if (n == 0) throw ConfigError("gen_h1: n must be positive");
    if (!(complex_fraction >= 0.0 && complex_fraction <= 1.0))
        throw ConfigError("gen_h1: complex fraction must lie in [0, 1]");
    const double target = complex_fraction * static_cast<double>(n);
    const auto n_complex = static_cast<std::size_t>(std::llround(target));
    if (std::abs(target - static_cast<double>(n_complex)) > 1e-9 || n_complex % 2 != 0)
        throw ConfigError("gen_h1: complex fraction must select an even number of eigenvalues");
    const std::size_t n_real = n - n_complex;

    SplitMix64 rng(seed);
    RealMatrix t(n, n);
    std::vector<complex> eig;
    eig.reserve(n);
    std::vector<bool> in_block(n, false); // first index of a 2x2 block
    for (std::size_t i = 0; i < n_real; ++i) {
        t(i, i) = static_cast<double>(i + 1);
        eig.emplace_back(static_cast<double>(i + 1), 0.0);
    }
    for (std::size_t i = n_real; i < n; i += 2) {
        const double k = static_cast<double>(i + 1);
        t(i, i) = k;
        t(i, i + 1) = k;
        t(i + 1, i) = -k;
        t(i + 1, i + 1) = k;
        in_block[i] = true;
        eig.emplace_back(k, k);
        eig.emplace_back(k, -k);
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (!(i + 1 == j && in_block[i])) t(i, j) = rng.uniform();

    // A = Q0 T Q0 with Q0 = I - 2 v v^T.
    std::vector<double> v(n);
    double vv = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        vv += x * x;
    }
    const double inv = 1.0 / std::sqrt(vv);
    for (auto& x : v) x *= inv;
    auto reflect_left = [&](RealMatrix& m) {
        for (std::size_t j = 0; j < n; ++j) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += v[i] * m(i, j);
            for (std::size_t i = 0; i < n; ++i) m(i, j) -= 2.0 * d * v[i];
        }
    };
    auto reflect_right = [&](RealMatrix& m) {
        std::vector<double> w(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) w[i] += m(i, j) * v[j];
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) m(i, j) -= 2.0 * w[i] * v[j];
    };
    reflect_left(t);
    reflect_right(t);

    HessenbergReduction red = householder_hessenberg(std::move(t), false);
    HessenbergMatrix h = HessenbergMatrix::from_upper_part(red.h);
    if (!h.is_unreduced()) throw StructureError("gen_h1 produced a reduced matrix; try another seed", 0, 0);
    return {std::move(h), std::move(eig)};
}

} // namespace hsrq
