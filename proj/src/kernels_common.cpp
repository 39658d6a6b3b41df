#include "detail.hpp"

namespace hsrq {

std::string_view kernel_name(KernelKind k) {
    switch (k) {
    case KernelKind::ReduceDiag: return "ReduceDiag";
    case KernelKind::ReduceOffdiag: return "ReduceOffdiag";
    case KernelKind::Solve: return "Solve";
    case KernelKind::Update: return "Update";
    case KernelKind::Backtransform: return "Backtransform";
    }
    return "?";
}

void KernelTimes::add(KernelKind k, double seconds) {
    ns_[static_cast<std::size_t>(k)].fetch_add(static_cast<std::int64_t>(seconds * 1e9),
                                               std::memory_order_relaxed);
}

double KernelTimes::total() const {
    double t = 0.0;
    for (std::size_t k = 0; k < kernel_kind_count; ++k) t += seconds(static_cast<KernelKind>(k));
    return t;
}

namespace detail {

void gemm_minus(ConstView a, ConstView b, View c) {
    const std::size_t m = a.rows(), p = a.cols(), n = b.cols();
    if (m == 0 || p == 0 || n == 0) return;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        double* c0 = c.col(j);
        double* c1 = c.col(j + 1);
        double* c2 = c.col(j + 2);
        double* c3 = c.col(j + 3);
        for (std::size_t q = 0; q < p; ++q) {
            const double* aq = a.col(q);
            const double b0 = b(q, j), b1 = b(q, j + 1), b2 = b(q, j + 2), b3 = b(q, j + 3);
            for (std::size_t i = 0; i < m; ++i) {
                const double v = aq[i];
                c0[i] -= v * b0;
                c1[i] -= v * b1;
                c2[i] -= v * b2;
                c3[i] -= v * b3;
            }
        }
    }
    for (; j < n; ++j) {
        double* c0 = c.col(j);
        for (std::size_t q = 0; q < p; ++q) {
            const double* aq = a.col(q);
            const double b0 = b(q, j);
            for (std::size_t i = 0; i < m; ++i) c0[i] -= aq[i] * b0;
        }
    }
}

} // namespace detail
} // namespace hsrq
