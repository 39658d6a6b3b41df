#pragma once

#include <span>
#include <vector>

#include "hsrq/matrix.hpp"

namespace hsrq {

// A list of shifts partitioned into batches of `width`. Real batches keep real values;
// complex batches hold one member of each conjugate pair (zero imaginary parts are allowed).
class ShiftBatch {
public:
    static ShiftBatch real(std::vector<double> shifts, std::size_t width);
    static ShiftBatch complex(std::vector<hsrq::complex> shifts, std::size_t width);

    Arithmetic arithmetic() const { return arithmetic_; }
    std::size_t size() const { return size_; }
    std::size_t width() const { return batches_.block(); }
    const BlockPartition& batches() const { return batches_; }
    std::size_t batch_count() const { return batches_.count(); }
    Range batch(std::size_t b) const { return batches_[b]; }

    std::span<const double> real_values() const { return real_; }
    std::span<const hsrq::complex> complex_values() const { return complex_; }
    std::span<const double> real_values(Range r) const { return std::span(real_).subspan(r.begin, r.size()); }
    std::span<const hsrq::complex> complex_values(Range r) const {
        return std::span(complex_).subspan(r.begin, r.size());
    }

private:
    ShiftBatch(Arithmetic a, std::size_t size, std::size_t width);

    Arithmetic arithmetic_ = Arithmetic::Real;
    std::size_t size_ = 0;
    BlockPartition batches_;
    std::vector<double> real_;
    std::vector<hsrq::complex> complex_;
};

} // namespace hsrq
