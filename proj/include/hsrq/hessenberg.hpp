#pragma once

#include "hsrq/matrix.hpp"

namespace hsrq {

// Immutable real upper Hessenberg matrix. Construction rejects nonzeros below the
// first subdiagonal; the infinity norm is computed once up front.
class HessenbergMatrix {
public:
    explicit HessenbergMatrix(RealMatrix entries);

    // Copies the Hessenberg part of `a`, discarding everything below the subdiagonal.
    static HessenbergMatrix from_upper_part(const RealMatrix& a);

    std::size_t order() const { return h_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return h_(i, j); }
    const RealMatrix& dense() const { return h_; }
    ConstView view() const { return h_.view(); }
    ConstView block(Range rows, Range cols) const { return h_.view().block(rows, cols); }

    double infinity_norm() const { return norm_inf_; }
    bool is_unreduced() const;

private:
    RealMatrix h_;
    double norm_inf_ = 0.0;
};

inline double infinity_norm(const HessenbergMatrix& h) { return h.infinity_norm(); }
inline bool is_unreduced(const HessenbergMatrix& h) { return h.is_unreduced(); }

} // namespace hsrq
