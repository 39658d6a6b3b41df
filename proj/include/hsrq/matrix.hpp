#pragma once

#include <algorithm>
#include <cassert>
#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace hsrq {

using complex = std::complex<double>;

enum class Arithmetic { Real, Complex };

// Reals per logical column: complex columns are two adjacent real columns [re im].
constexpr std::size_t reals_per_value(Arithmetic a) { return a == Arithmetic::Real ? 1 : 2; }

struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return end == begin; }
    friend bool operator==(const Range&, const Range&) = default;
};

// Non-owning column-major view. T may be const-qualified.
template <class T>
class MatrixView {
public:
    MatrixView() = default;
    MatrixView(T* data, std::size_t rows, std::size_t cols, std::size_t ld)
        : data_(data), rows_(rows), cols_(cols), ld_(ld) {
        assert(ld >= rows || cols == 0);
    }

    template <class U>
        requires std::is_same_v<const U, T> && (!std::is_same_v<U, T>)
    MatrixView(const MatrixView<U>& other)
        : data_(other.data()), rows_(other.rows()), cols_(other.cols()), ld_(other.ld()) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t ld() const { return ld_; }
    T* data() const { return data_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i + j * ld_];
    }
    T* col(std::size_t j) const { return data_ + j * ld_; }

    MatrixView block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
        assert(i0 + r <= rows_ && j0 + c <= cols_);
        return MatrixView(data_ + i0 + j0 * ld_, r, c, ld_);
    }
    MatrixView block(Range r, Range c) const { return block(r.begin, c.begin, r.size(), c.size()); }

private:
    T* data_ = nullptr;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t ld_ = 0;
};

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i + j * rows_];
    }
    const T& operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i + j * rows_];
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::span<T> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
    std::span<const T> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }
    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }

    MatrixView<T> view() { return {data_.data(), rows_, cols_, std::max<std::size_t>(rows_, 1)}; }
    MatrixView<const T> view() const {
        return {data_.data(), rows_, cols_, std::max<std::size_t>(rows_, 1)};
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<complex>;
using View = MatrixView<double>;
using ConstView = MatrixView<const double>;

// Splits 0..extent into consecutive blocks of `block`; the last one may be shorter.
// Used for tile rows of H and for batches of shifts.
class BlockPartition {
public:
    BlockPartition() = default;
    BlockPartition(std::size_t extent, std::size_t block);

    std::size_t extent() const { return extent_; }
    std::size_t block() const { return block_; }
    std::size_t count() const { return count_; }
    Range operator[](std::size_t t) const {
        assert(t < count_);
        return {t * block_, std::min(extent_, (t + 1) * block_)};
    }
    std::size_t owner(std::size_t index) const { return index / block_; }

private:
    std::size_t extent_ = 0;
    std::size_t block_ = 1;
    std::size_t count_ = 0;
};

using TileGrid = BlockPartition;

// Interleaved storage helpers: logical complex column j occupies real columns 2j and 2j+1.
RealMatrix interleave(const ComplexMatrix& z);
ComplexMatrix deinterleave(const RealMatrix& x);
std::vector<complex> complex_column(const RealMatrix& x, std::size_t j);
void set_complex_column(RealMatrix& x, std::size_t j, std::span<const complex> values);

} // namespace hsrq
