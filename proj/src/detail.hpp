#pragma once

#include <chrono>
#include <span>

#include "hsrq/flops.hpp"
#include "hsrq/matrix.hpp"

namespace hsrq::detail {

// c -= a * b (column-major). Every c(i,j) accumulates its products in increasing
// inner index, independent of how columns are grouped, so results do not depend on
// batch composition.
void gemm_minus(ConstView a, ConstView b, View c);

template <class F>
void timed(KernelTimes* times, KernelKind kind, F&& f) {
    if (!times) {
        f();
        return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    times->add(kind, dt.count());
}

inline std::span<const double> column_span(ConstView v, std::size_t j) { return {v.col(j), v.rows()}; }
inline std::span<double> column_span(View v, std::size_t j) { return {v.col(j), v.rows()}; }

// Subspan of H's column j restricted to rows.
inline std::span<const double> column_part(ConstView h, std::size_t j, Range rows) {
    return {h.col(j) + rows.begin, rows.size()};
}

} // namespace hsrq::detail
