#pragma once

#include <span>

#include "hsrq/flops.hpp"
#include "hsrq/hessenberg.hpp"
#include "hsrq/shifts.hpp"
#include "hsrq/storage.hpp"

namespace hsrq {

// Top-left tile: there is no column to the left, row 0 keeps the padding rotation.
struct ZeroColumn {};
inline constexpr ZeroColumn zero_column{};
// Tiles away from the superdiagonal see no diagonal entry, so no shift is applied.
struct ZeroShift {};
inline constexpr ZeroShift zero_shift{};

struct ExecutionOptions {
    std::size_t workers = 1;
    FlopCounters* flops = nullptr;
    KernelTimes* times = nullptr;
};

// Diagonal tile of k rows. h_diag = H(J, J.begin .. J.end-2) (k x (k-1)), h_left = H(J, J.begin-1),
// right = cross-over columns on rows J (k x w, interleaved for complex).
// Records rotations k-1..1 and the cross-tile rotation at row 0 for each shift.
void reduce_diag(ConstView h_diag, std::span<const double> h_left, std::span<const double> shifts,
                 ConstView right, RotationSlice<double> rot, const KernelContext& ctx = {});
void reduce_diag(ConstView h_diag, ZeroColumn, std::span<const double> shifts, ConstView right,
                 RotationSlice<double> rot, const KernelContext& ctx = {});
void creduce_diag(ConstView h_diag, std::span<const double> h_left, std::span<const complex> shifts,
                  ConstView right, RotationSlice<double> rot, const KernelContext& ctx = {});
void creduce_diag(ConstView h_diag, ZeroColumn, std::span<const complex> shifts, ConstView right,
                  RotationSlice<double> rot, const KernelContext& ctx = {});

// Tile above the diagonal: h_tile = H(I, J.begin-1 .. J.end-2) (m x k), right = cross-over
// columns on rows I, rot = rotations of tile column J. Writes the left cross-over columns.
void reduce_offdiag(ConstView h_tile, ConstView right, std::span<const double> shifts,
                    RotationSlice<const double> rot, View left, const KernelContext& ctx = {});
void reduce_offdiag(ConstView h_tile, ConstView right, ZeroShift, RotationSlice<const double> rot,
                    View left, const KernelContext& ctx = {});
void creduce_offdiag(ConstView h_tile, ConstView right, std::span<const complex> shifts,
                     RotationSlice<const double> rot, View left, const KernelContext& ctx = {});
void creduce_offdiag(ConstView h_tile, ConstView right, ZeroShift, RotationSlice<const double> rot,
                     View left, const KernelContext& ctx = {});

struct Reduction {
    GivensTable rotations;
    CrossoverSet crossover;
};

// Records, for every shift, the rotations with (H - lambda I) G_n^T ... G_2^T upper
// triangular, plus the cross-over columns the solve phase needs. Dispatches on the
// arithmetic of `shifts`.
Reduction tiled_reduce(const HessenbergMatrix& h, const TileGrid& grid, const ShiftBatch& shifts,
                       const ExecutionOptions& opts = {}, std::vector<double> workspace = {});

} // namespace hsrq
