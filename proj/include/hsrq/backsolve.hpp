#pragma once

#include <span>
#include <vector>

#include "hsrq/overflow.hpp"
#include "hsrq/reduce.hpp"

namespace hsrq {

// --- Non-robust kernels -------------------------------------------------------------

// Backward substitution on a diagonal tile, in place on x (k x w). The triangular
// column is rebuilt from the recorded rotations one step at a time.
void solve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const double> shifts,
                ConstView right, RotationSlice<const double> rot, View x, const KernelContext& ctx = {});
void solve_tile(ConstView h_diag, ZeroColumn, std::span<const double> shifts, ConstView right,
                RotationSlice<const double> rot, View x, const KernelContext& ctx = {});
void csolve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const complex> shifts,
                 ConstView right, RotationSlice<const double> rot, View x, const KernelContext& ctx = {});
void csolve_tile(ConstView h_diag, ZeroColumn, std::span<const complex> shifts, ConstView right,
                 RotationSlice<const double> rot, View x, const KernelContext& ctx = {});

// b -= (rows I of the already-solved part) * x_below. h_tile = H(I, J.begin-1 .. J.end-2)
// (m x k), right = cross-over columns on rows I of tile column J, x_below = X(J, batch).
void update_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> shifts,
                 RotationSlice<const double> rot, View b, const KernelContext& ctx = {});
void update_tile(ConstView h_tile, ConstView right, ConstView x_below, ZeroShift,
                 RotationSlice<const double> rot, View b, const KernelContext& ctx = {});
void cupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const complex> shifts,
                  RotationSlice<const double> rot, View b, const KernelContext& ctx = {});
void cupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, ZeroShift,
                  RotationSlice<const double> rot, View b, const KernelContext& ctx = {});

// x <- G_n^T (... (G_2^T x)); c, s are one shift's rotation column.
void backtransform(std::span<const double> c, std::span<const double> s, std::span<double> x,
                   const KernelContext& ctx = {});
void cbacktransform(std::span<const double> c_re, std::span<const double> c_im, std::span<const double> s,
                    std::span<double> x_re, std::span<double> x_im, const KernelContext& ctx = {});

// --- Robust kernels -----------------------------------------------------------------

// On entry scale[l] is beta (B tile represents beta^-1 b); on exit alpha = gamma*beta.
void rsolve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const double> shifts,
                 ConstView right, RotationSlice<const double> rot, View x, std::span<double> scale,
                 const OverflowBudget& budget, const KernelContext& ctx = {});
void rsolve_tile(ConstView h_diag, ZeroColumn, std::span<const double> shifts, ConstView right,
                 RotationSlice<const double> rot, View x, std::span<double> scale,
                 const OverflowBudget& budget, const KernelContext& ctx = {});
void crsolve_tile(ConstView h_diag, std::span<const double> h_left, std::span<const complex> shifts,
                  ConstView right, RotationSlice<const double> rot, View x, std::span<double> scale,
                  const OverflowBudget& budget, const KernelContext& ctx = {});
void crsolve_tile(ConstView h_diag, ZeroColumn, std::span<const complex> shifts, ConstView right,
                  RotationSlice<const double> rot, View x, std::span<double> scale,
                  const OverflowBudget& budget, const KernelContext& ctx = {});

// On entry scale[l] is beta of b; alpha_below are the factors of x_below. On exit
// scale[l] is delta, the factor now attached to b.
void rupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                  std::span<const double> shifts, RotationSlice<const double> rot, View b,
                  std::span<double> scale, const OverflowBudget& budget, const KernelContext& ctx = {});
void rupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                  ZeroShift, RotationSlice<const double> rot, View b, std::span<double> scale,
                  const OverflowBudget& budget, const KernelContext& ctx = {});
void crupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                   std::span<const complex> shifts, RotationSlice<const double> rot, View b,
                   std::span<double> scale, const OverflowBudget& budget, const KernelContext& ctx = {});
void crupdate_tile(ConstView h_tile, ConstView right, ConstView x_below, std::span<const double> alpha_below,
                   ZeroShift, RotationSlice<const double> rot, View b, std::span<double> scale,
                   const OverflowBudget& budget, const KernelContext& ctx = {});

// 2-norm of a represented vector: scaled / alpha. Kept split so it never overflows.
struct ScaledNorm {
    double scaled = 0.0;
    double alpha = 1.0;

    double value() const { return scaled / alpha; }
    bool exceeds(double threshold) const { return scaled > threshold * alpha; }
};

// Consistency-scales the segments of one column to their smallest factor, then either
// backtransforms (normalize = false, x then represents alpha_min^-1 times the solution)
// or normalizes to unit 2-norm while backtransforming. Returns the pre-normalization norm.
ScaledNorm rbacktransform(std::span<const double> c, std::span<const double> s,
                          std::span<const double> alpha, const TileGrid& grid, std::span<double> x,
                          bool normalize = true, const KernelContext& ctx = {});
ScaledNorm crbacktransform(std::span<const double> c_re, std::span<const double> c_im,
                           std::span<const double> s, std::span<const double> alpha, const TileGrid& grid,
                           std::span<double> x_re, std::span<double> x_im, bool normalize = true,
                           const KernelContext& ctx = {});

// --- Tiled drivers ------------------------------------------------------------------

enum class SolveMode { System, Eigenvector };

struct SolutionBlock {
    Arithmetic arithmetic = Arithmetic::Real;
    RealMatrix x;                  // n x m, or n x 2m interleaved
    ScalingMatrix segment_scales;  // factors per tile row before consistency scaling
    std::vector<double> scale;     // per column: (H - lambda I) x = scale * b (system mode)
    std::vector<ScaledNorm> norms; // per column: pre-normalization norm (eigenvector mode)
};

// Non-robust solve from a finished reduction.
RealMatrix tiled_solve(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts,
                       const Reduction& red, const RealMatrix& b, const ExecutionOptions& opts = {});

SolutionBlock robust_tiled_solve(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts,
                                 const Reduction& red, const RealMatrix& b, SolveMode mode,
                                 const ExecutionOptions& opts = {});

struct SolverOptions {
    std::size_t tile_rows = 128;
    std::size_t batch_width = 32;
    std::size_t workers = 1;
    bool robust = true;
    SolveMode mode = SolveMode::System;
    FlopCounters* flops = nullptr;
    KernelTimes* times = nullptr;
    // Reused for the cross-over columns when set; peak size is reported back through it.
    std::vector<double>* workspace = nullptr;
};

// Tiled reduction followed by the (robust or plain) tiled solve.
SolutionBlock dhsrq3(const HessenbergMatrix& h, std::span<const double> shifts, const RealMatrix& b,
                     const SolverOptions& opts = {});
SolutionBlock chsrq3(const HessenbergMatrix& h, std::span<const complex> shifts, const RealMatrix& b,
                     const SolverOptions& opts = {});

} // namespace hsrq
