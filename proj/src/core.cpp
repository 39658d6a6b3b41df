#include <algorithm>
#include <cmath>
#include <string>

#include "hsrq/errors.hpp"
#include "hsrq/hessenberg.hpp"
#include "hsrq/shifts.hpp"
#include "hsrq/storage.hpp"

namespace hsrq {

BlockPartition::BlockPartition(std::size_t extent, std::size_t block) : extent_(extent), block_(block) {
    if (block == 0) throw ConfigError("block size must be positive");
    count_ = (extent + block - 1) / block;
}

RealMatrix interleave(const ComplexMatrix& z) {
    RealMatrix x(z.rows(), 2 * z.cols());
    for (std::size_t j = 0; j < z.cols(); ++j)
        for (std::size_t i = 0; i < z.rows(); ++i) {
            x(i, 2 * j) = z(i, j).real();
            x(i, 2 * j + 1) = z(i, j).imag();
        }
    return x;
}

ComplexMatrix deinterleave(const RealMatrix& x) {
    ComplexMatrix z(x.rows(), x.cols() / 2);
    for (std::size_t j = 0; j < z.cols(); ++j)
        for (std::size_t i = 0; i < z.rows(); ++i) z(i, j) = {x(i, 2 * j), x(i, 2 * j + 1)};
    return z;
}

std::vector<complex> complex_column(const RealMatrix& x, std::size_t j) {
    std::vector<complex> v(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) v[i] = {x(i, 2 * j), x(i, 2 * j + 1)};
    return v;
}

void set_complex_column(RealMatrix& x, std::size_t j, std::span<const complex> values) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        x(i, 2 * j) = values[i].real();
        x(i, 2 * j + 1) = values[i].imag();
    }
}

// ---------------------------------------------------------------------------------

HessenbergMatrix::HessenbergMatrix(RealMatrix entries) : h_(std::move(entries)) {
    const std::size_t n = h_.rows();
    if (n == 0 || h_.cols() != n) throw ConfigError("Hessenberg matrix must be square and nonempty");
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 2; i < n; ++i)
            if (h_(i, j) != 0.0) throw StructureError("nonzero below the subdiagonal", i, j);
    std::vector<double> rowsum(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < std::min(n, j + 2); ++i) {
            if (!std::isfinite(h_(i, j))) throw StructureError("non-finite entry", i, j);
            rowsum[i] += std::abs(h_(i, j));
        }
    norm_inf_ = *std::max_element(rowsum.begin(), rowsum.end());
}

HessenbergMatrix HessenbergMatrix::from_upper_part(const RealMatrix& a) {
    RealMatrix h = a;
    for (std::size_t j = 0; j < h.cols(); ++j)
        for (std::size_t i = j + 2; i < h.rows(); ++i) h(i, j) = 0.0;
    return HessenbergMatrix(std::move(h));
}

bool HessenbergMatrix::is_unreduced() const {
    for (std::size_t j = 0; j + 1 < order(); ++j)
        if (h_(j + 1, j) == 0.0) return false;
    return true;
}

// ---------------------------------------------------------------------------------

ShiftBatch::ShiftBatch(Arithmetic a, std::size_t size, std::size_t width)
    : arithmetic_(a), size_(size), batches_(size, width) {}

ShiftBatch ShiftBatch::real(std::vector<double> shifts, std::size_t width) {
    ShiftBatch b(Arithmetic::Real, shifts.size(), width);
    for (double v : shifts)
        if (!std::isfinite(v)) throw ConfigError("non-finite shift");
    b.real_ = std::move(shifts);
    return b;
}

ShiftBatch ShiftBatch::complex(std::vector<hsrq::complex> shifts, std::size_t width) {
    ShiftBatch b(Arithmetic::Complex, shifts.size(), width);
    for (auto v : shifts)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ConfigError("non-finite shift");
    b.complex_ = std::move(shifts);
    return b;
}

// ---------------------------------------------------------------------------------

GivensTable::GivensTable(std::size_t n, std::size_t shifts, Arithmetic arithmetic)
    : arithmetic_(arithmetic), c_re_(n, shifts, 1.0), s_(n, shifts, 0.0) {
    if (arithmetic == Arithmetic::Complex) c_im_ = RealMatrix(n, shifts, 0.0);
}

void GivensTable::set(std::size_t j, std::size_t l, const RealRotation& r) {
    c_re_(j, l) = r.c;
    s_(j, l) = r.s;
}

void GivensTable::set(std::size_t j, std::size_t l, const ComplexRotation& r) {
    c_re_(j, l) = r.c.real();
    c_im_(j, l) = r.c.imag();
    s_(j, l) = r.s;
}

RotationSlice<double> GivensTable::slice(Range rows, Range shifts) {
    RotationSlice<double> out{c_re_.view().block(rows, shifts), {}, s_.view().block(rows, shifts)};
    if (arithmetic_ == Arithmetic::Complex) out.c_im = c_im_.view().block(rows, shifts);
    return out;
}

RotationSlice<const double> GivensTable::slice(Range rows, Range shifts) const {
    RotationSlice<const double> out{c_re_.view().block(rows, shifts), {}, s_.view().block(rows, shifts)};
    if (arithmetic_ == Arithmetic::Complex) out.c_im = c_im_.view().block(rows, shifts);
    return out;
}

RealMatrix GivensTable::compact() const {
    const std::size_t n = rows(), m = shifts();
    if (arithmetic_ == Arithmetic::Real) {
        RealMatrix t(n, m);
        for (std::size_t l = 0; l < m; ++l)
            for (std::size_t j = 0; j < n; ++j) t(j, l) = compact_encode(real_rotation(j, l));
        return t;
    }
    RealMatrix t(2 * n, m);
    for (std::size_t l = 0; l < m; ++l)
        for (std::size_t j = 0; j < n; ++j) {
            auto code = compact_encode(complex_rotation(j, l));
            t(2 * j, l) = code[0];
            t(2 * j + 1, l) = code[1];
        }
    return t;
}

GivensTable GivensTable::from_compact(const RealMatrix& t, Arithmetic arithmetic) {
    const std::size_t m = t.cols();
    if (arithmetic == Arithmetic::Real) {
        GivensTable g(t.rows(), m, arithmetic);
        for (std::size_t l = 0; l < m; ++l)
            for (std::size_t j = 0; j < t.rows(); ++j) g.set(j, l, compact_decode(t(j, l)));
        return g;
    }
    GivensTable g(t.rows() / 2, m, arithmetic);
    for (std::size_t l = 0; l < m; ++l)
        for (std::size_t j = 0; j < t.rows() / 2; ++j)
            g.set(j, l, compact_decode(std::array<double, 2>{t(2 * j, l), t(2 * j + 1, l)}));
    return g;
}

// ---------------------------------------------------------------------------------

CrossoverSet::CrossoverSet(const TileGrid& grid, std::size_t shifts, Arithmetic arithmetic,
                           std::vector<double> buffer)
    : grid_(grid), arithmetic_(arithmetic), shifts_(shifts), data_(std::move(buffer)) {
    const std::size_t width = reals_per_value(arithmetic) * shifts;
    offset_.resize(grid.count() + 1, 0);
    for (std::size_t t = 0; t < grid.count(); ++t) offset_[t + 1] = offset_[t] + grid[t].end * width;
    data_.assign(offset_.back(), 0.0);
}

View CrossoverSet::slice(std::size_t tile_col, Range rows, Range batch) {
    const std::size_t ld = grid_[tile_col].end;
    const std::size_t w = reals_per_value(arithmetic_);
    assert(rows.end <= ld && batch.end <= shifts_);
    return View(data_.data() + offset_[tile_col] + rows.begin + w * batch.begin * ld, rows.size(),
                w * batch.size(), ld);
}

ConstView CrossoverSet::slice(std::size_t tile_col, Range rows, Range batch) const {
    const std::size_t ld = grid_[tile_col].end;
    const std::size_t w = reals_per_value(arithmetic_);
    assert(rows.end <= ld && batch.end <= shifts_);
    return ConstView(data_.data() + offset_[tile_col] + rows.begin + w * batch.begin * ld, rows.size(),
                     w * batch.size(), ld);
}

double ScalingMatrix::min_factor() const {
    auto v = alpha_.values();
    return v.empty() ? 1.0 : *std::min_element(v.begin(), v.end());
}

} // namespace hsrq
