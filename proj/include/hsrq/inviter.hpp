#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsrq/backsolve.hpp"

namespace hsrq {

struct InviterConfig {
    std::size_t tile_rows = 128;
    std::size_t batch_width = 32;
    std::size_t workers = 1;
    std::size_t max_restarts = 3;
    // Cap on reals held in cross-over columns at once; 0 means unlimited.
    std::size_t workspace_cap = 0;
    std::uint64_t seed = 0x5eed;
    FlopCounters* flops = nullptr;
    KernelTimes* times = nullptr;
};

// Column layout: a real eigenvalue owns one column, a complex one owns two adjacent
// columns [re im] holding the vector for the value as given; the vector for its
// conjugate is the elementwise conjugate.
struct EigvecResult {
    RealMatrix vectors;
    std::vector<std::size_t> first_column; // per eigenvalue
    std::vector<bool> is_complex;
    std::vector<bool> converged;
    std::vector<std::size_t> restarts; // solves beyond the first, per eigenvalue
    std::size_t peak_workspace = 0;    // reals in cross-over columns, high-water mark

    std::size_t size() const { return converged.size(); }
    std::vector<complex> vector(std::size_t k) const;
    std::vector<complex> conjugate_vector(std::size_t k) const;
};

// rho * ones with rho = eps * ||H||_inf.
std::vector<double> starting_vector(const HessenbergMatrix& h);

bool converged(double x_norm2, std::size_t n);
bool converged(const ScaledNorm& x_norm2, std::size_t n);

EigvecResult dhsrq3in(const HessenbergMatrix& h, std::span<const double> eigenvalues,
                      const InviterConfig& config = {});
EigvecResult chsrq3in(const HessenbergMatrix& h, std::span<const complex> eigenvalues,
                      const InviterConfig& config = {});

// Mixed selection: values with zero imaginary part are treated as real. Real ones are
// processed in groups of 2g, complex ones in groups of g, g = floor(cap / (2 n N)).
EigvecResult hsrq3in(const HessenbergMatrix& h, std::span<const complex> selection,
                     const InviterConfig& config = {});

} // namespace hsrq
