#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "hsrq/hessenberg.hpp"
#include "hsrq/matrix.hpp"

namespace hsrq::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_numerical = 1;
inline constexpr int exit_usage = 2;

// Thrown for bad flag combinations the parser cannot catch.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MatrixSource {
    std::string file;
    std::string problem; // h1 | h2 | h3 | random
    std::size_t n = 256;
    std::uint64_t seed = 1;
    double complex_fraction = 0.0;
};

struct LoadedMatrix {
    HessenbergMatrix h;
    std::optional<std::vector<complex>> eigenvalues; // known only for h1
    std::string name;
};

LoadedMatrix load_matrix(const MatrixSource& src);

// ||(H - lambda I) x - alpha b||_inf / (||H - lambda I||_inf ||x||_inf), on x / ||x||_inf so
// it stays finite for solutions close to overflow. Infinite when x is not finite or zero.
double scaled_residual(const HessenbergMatrix& h, complex lambda, const std::vector<complex>& x, double alpha,
                       const std::vector<complex>& b);

// ||H x - lambda x||_2
double eigen_residual(const HessenbergMatrix& h, complex lambda, const std::vector<complex>& x);

std::vector<complex> as_complex(std::span<const double> v);

// Opens `path` for writing, or stdout when empty or "-".
class Output {
public:
    explicit Output(const std::string& path);
    ~Output();
    Output(const Output&) = delete;
    Output& operator=(const Output&) = delete;
    std::FILE* get() const { return f_; }

private:
    std::FILE* f_ = stdout;
    bool owned_ = false;
};

int run_verify(bool quick, bool corrupt_givens);

} // namespace hsrq::cli
