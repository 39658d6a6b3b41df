#include "common.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "hsrq/errors.hpp"
#include "hsrq/io.hpp"
#include "hsrq/testprob.hpp"

namespace hsrq::cli {

LoadedMatrix load_matrix(const MatrixSource& src) {
    if (!src.file.empty()) {
        if (!src.problem.empty()) throw UsageError("give either --matrix or --problem, not both");
        return {HessenbergMatrix(read_matrix(src.file)), std::nullopt, src.file};
    }
    const std::string tag = src.problem + "(n=" + std::to_string(src.n) + ")";
    if (src.problem == "h1") {
        TestProblem p = gen_h1(src.n, src.complex_fraction, src.seed);
        return {std::move(p.h), std::move(p.eigenvalues), tag};
    }
    if (src.problem == "h2") return {gen_h2(src.n), std::nullopt, tag};
    if (src.problem == "h3") return {gen_h3(src.n), std::nullopt, tag};
    if (src.problem == "random") return {random_hessenberg(src.n, src.seed), std::nullopt, tag};
    throw UsageError("a matrix source is required: --matrix FILE or --problem {h1|h2|h3|random}");
}

namespace {

std::vector<complex> shifted_product(const HessenbergMatrix& h, complex lambda, const std::vector<complex>& x) {
    const std::size_t n = h.order();
    std::vector<complex> y(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < std::min(n, j + 2); ++i) y[i] += h(i, j) * x[j];
    for (std::size_t i = 0; i < n; ++i) y[i] -= lambda * x[i];
    return y;
}

} // namespace

double scaled_residual(const HessenbergMatrix& h, complex lambda, const std::vector<complex>& x, double alpha,
                       const std::vector<complex>& b) {
    double xn = 0.0;
    for (auto v : x) xn = std::max(xn, std::abs(v));
    if (!(xn > 0.0) || !std::isfinite(xn)) return INFINITY;
    std::vector<complex> unit(x);
    for (auto& v : unit) v /= xn;
    const auto y = shifted_product(h, lambda, unit);
    double r = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs(y[i] - (alpha / xn) * b[i]));
    const std::size_t n = h.order();
    double an = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = i == 0 ? 0 : i - 1; j < n; ++j) row += std::abs(complex(h(i, j)) - (i == j ? lambda : 0.0));
        an = std::max(an, row);
    }
    return r / an;
}

double eigen_residual(const HessenbergMatrix& h, complex lambda, const std::vector<complex>& x) {
    double s = 0.0;
    for (auto v : shifted_product(h, lambda, x)) s += std::norm(v);
    return std::sqrt(s);
}

std::vector<complex> as_complex(std::span<const double> v) { return {v.begin(), v.end()}; }

Output::Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    f_ = std::fopen(path.c_str(), "w");
    if (!f_) throw Error("cannot write " + path + ": " + std::strerror(errno));
    owned_ = true;
}

Output::~Output() {
    if (owned_) std::fclose(f_);
    else std::fflush(f_);
}

} // namespace hsrq::cli
