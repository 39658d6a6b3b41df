#pragma once

#include <vector>

#include "hsrq/givens.hpp"
#include "hsrq/matrix.hpp"

namespace hsrq {

// Rotation components for a (tile rows x shifts) slice. `c_im` is empty for real tables.
template <class T>
struct RotationSlice {
    MatrixView<T> c_re;
    MatrixView<T> c_im;
    MatrixView<T> s;

    operator RotationSlice<const T>() const
        requires(!std::is_const_v<T>)
    {
        return {c_re, c_im, s};
    }
};

// Rotation j of shift l acts on columns j-1 and j. Row 0 is padding (c = 1, s = 0)
// unless a rotation was stored there.
class GivensTable {
public:
    GivensTable() = default;
    GivensTable(std::size_t n, std::size_t shifts, Arithmetic arithmetic);

    Arithmetic arithmetic() const { return arithmetic_; }
    std::size_t rows() const { return s_.rows(); }
    std::size_t shifts() const { return s_.cols(); }

    const RealMatrix& c() const { return c_re_; }
    const RealMatrix& c_im() const { return c_im_; }
    const RealMatrix& s() const { return s_; }

    RealRotation real_rotation(std::size_t j, std::size_t l) const { return {c_re_(j, l), s_(j, l), 0.0, false}; }
    ComplexRotation complex_rotation(std::size_t j, std::size_t l) const {
        return {{c_re_(j, l), c_im_(j, l)}, s_(j, l), {0.0, 0.0}, false};
    }
    void set(std::size_t j, std::size_t l, const RealRotation& r);
    void set(std::size_t j, std::size_t l, const ComplexRotation& r);

    RotationSlice<double> slice(Range rows, Range shifts);
    RotationSlice<const double> slice(Range rows, Range shifts) const;

    // n x m (real) or 2n x m (complex) compact encoding.
    RealMatrix compact() const;
    static GivensTable from_compact(const RealMatrix& t, Arithmetic arithmetic);

private:
    Arithmetic arithmetic_ = Arithmetic::Real;
    RealMatrix c_re_;
    RealMatrix c_im_;
    RealMatrix s_;
};

// Cross-over columns. Logical column t of shift l is defined on rows 0..grid[t].end;
// for each t the shifts are laid out as adjacent (interleaved for complex) real columns,
// so a (rows x batch) slice is an ordinary column-major view.
class CrossoverSet {
public:
    CrossoverSet() = default;
    CrossoverSet(const TileGrid& grid, std::size_t shifts, Arithmetic arithmetic,
                 std::vector<double> buffer = {});

    Arithmetic arithmetic() const { return arithmetic_; }
    std::size_t shifts() const { return shifts_; }

    // rows must lie within 0..grid[tile_col].end. Returns rows x (width*|batch|).
    View slice(std::size_t tile_col, Range rows, Range batch);
    ConstView slice(std::size_t tile_col, Range rows, Range batch) const;

    std::size_t storage_size() const { return data_.size(); }
    // Hands the allocation back for reuse by a later set.
    std::vector<double> release() { return std::move(data_); }

private:
    TileGrid grid_;
    Arithmetic arithmetic_ = Arithmetic::Real;
    std::size_t shifts_ = 0;
    std::vector<std::size_t> offset_;
    std::vector<double> data_;
};

// alpha(i, l): stored tile-row segment i of column l represents alpha^-1 times the true one.
class ScalingMatrix {
public:
    ScalingMatrix() = default;
    ScalingMatrix(std::size_t tiles, std::size_t shifts) : alpha_(tiles, shifts, 1.0) {}

    std::size_t tiles() const { return alpha_.rows(); }
    std::size_t shifts() const { return alpha_.cols(); }
    double& operator()(std::size_t i, std::size_t l) { return alpha_(i, l); }
    double operator()(std::size_t i, std::size_t l) const { return alpha_(i, l); }
    std::span<const double> column(std::size_t l) const { return alpha_.col(l); }
    std::span<const double> values() const { return alpha_.values(); }
    double min_factor() const;

private:
    RealMatrix alpha_;
};

} // namespace hsrq
