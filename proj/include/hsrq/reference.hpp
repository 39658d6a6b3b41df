#pragma once

#include <span>
#include <vector>

#include "hsrq/flops.hpp"
#include "hsrq/hessenberg.hpp"
#include "hsrq/overflow.hpp"

namespace hsrq {

// Rotations produced by a single-shift sweep; index j annihilates entry (j, j-1).
struct HenryTrace {
    std::vector<complex> c;
    std::vector<double> s;
};

// Single-shift merged RQ factorization and substitution, one column sweep.
std::vector<double> henry_rq_solve(const HessenbergMatrix& h, double shift, std::span<const double> b,
                                   HenryTrace* trace = nullptr, FlopCounters* flops = nullptr);
std::vector<complex> henry_rq_solve(const HessenbergMatrix& h, complex shift, std::span<const complex> b,
                                    HenryTrace* trace = nullptr, FlopCounters* flops = nullptr);

template <class T>
struct LuInvitResult {
    std::vector<T> x;
    double scale = 1.0;          // U x = scale * L^-1 P b
    std::size_t interchanges = 0;
};

// H - shift I = P L U with partial pivoting between neighbouring rows, then a robust
// solve with U.
LuInvitResult<double> hessenberg_lu_invit(const HessenbergMatrix& h, double shift, std::span<const double> b);
LuInvitResult<complex> hessenberg_lu_invit(const HessenbergMatrix& h, complex shift, std::span<const complex> b);

// Dense partial-pivoting LU solve. Test oracle only.
std::vector<double> dense_solve_oracle(const RealMatrix& a, std::span<const double> b);
std::vector<complex> dense_solve_oracle(const ComplexMatrix& a, std::span<const complex> b);

} // namespace hsrq
