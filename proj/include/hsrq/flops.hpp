#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <string_view>

namespace hsrq {

enum class KernelKind : unsigned { ReduceDiag, ReduceOffdiag, Solve, Update, Backtransform };
inline constexpr std::size_t kernel_kind_count = 5;

std::string_view kernel_name(KernelKind k);

// Arithmetic operation counts recorded by the kernels, one atomic add per kernel call.
// `shift_calls` counts (kernel call, shift) pairs so averages are per shift.
class FlopCounters {
public:
    void record(KernelKind k, std::uint64_t flops, std::uint64_t shift_calls) {
        flops_[index(k)].fetch_add(flops, std::memory_order_relaxed);
        calls_[index(k)].fetch_add(shift_calls, std::memory_order_relaxed);
    }
    std::uint64_t flops(KernelKind k) const { return flops_[index(k)].load(); }
    std::uint64_t shift_calls(KernelKind k) const { return calls_[index(k)].load(); }
    double per_shift_call(KernelKind k) const {
        auto c = shift_calls(k);
        return c == 0 ? 0.0 : static_cast<double>(flops(k)) / static_cast<double>(c);
    }
    void reset() {
        for (auto& f : flops_) f = 0;
        for (auto& c : calls_) c = 0;
    }

private:
    static std::size_t index(KernelKind k) { return static_cast<std::size_t>(k); }

    std::array<std::atomic<std::uint64_t>, kernel_kind_count> flops_{};
    std::array<std::atomic<std::uint64_t>, kernel_kind_count> calls_{};
};

// Wall-clock seconds per kernel kind, summed over tasks.
class KernelTimes {
public:
    void add(KernelKind k, double seconds);
    double seconds(KernelKind k) const { return ns_[static_cast<std::size_t>(k)].load() * 1e-9; }
    double total() const;
    void reset() {
        for (auto& t : ns_) t = 0;
    }

private:
    std::array<std::atomic<std::int64_t>, kernel_kind_count> ns_{};
};

// Optional instrumentation threaded through kernels. Row/shift origins only
// serve to name global coordinates in error messages.
struct KernelContext {
    FlopCounters* flops = nullptr;
    std::size_t row_origin = 0;
    std::size_t shift_origin = 0;

    void count(KernelKind k, std::uint64_t f, std::uint64_t shift_calls) const {
        if (flops) flops->record(k, f, shift_calls);
    }
};

} // namespace hsrq
