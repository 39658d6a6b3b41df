#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "hsrq/errors.hpp"
#include "hsrq/io.hpp"

namespace hsrq {

namespace {

constexpr std::array<char, 4> magic{'H', 'S', 'R', 'Q'};

static_assert(std::endian::native == std::endian::little, "binary matrix files assume a little-endian host");

template <class U>
U read_pod(std::istream& in, const std::filesystem::path& path) {
    U v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("truncated matrix file: " + path.string());
    return v;
}

template <class U>
void write_pod(std::ostream& out, U v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

RealMatrix read_binary(std::ifstream& in, const std::filesystem::path& path) {
    in.seekg(magic.size());
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != matrix_file_version)
        throw Error("unsupported matrix file version " + std::to_string(version) + ": " + path.string());
    const auto n = read_pod<std::uint32_t>(in, path);
    (void)read_pod<std::uint32_t>(in, path); // flags: informational
    RealMatrix a(n, n);
    const auto bytes = static_cast<std::streamsize>(sizeof(double) * n * n);
    if (!in.read(reinterpret_cast<char*>(a.data()), bytes)) throw Error("truncated matrix file: " + path.string());
    return a;
}

RealMatrix read_text(std::ifstream& in, const std::filesystem::path& path) {
    std::size_t n = 0;
    if (!(in >> n)) throw Error("cannot read matrix order: " + path.string());
    RealMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(in >> a(i, j))) throw Error("matrix file ends early: " + path.string());
    return a;
}

} // namespace

RealMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    if (in.gcount() == static_cast<std::streamsize>(head.size()) && head == magic) return read_binary(in, path);
    in.clear();
    in.seekg(0);
    return read_text(in, path);
}

void write_matrix_binary(const std::filesystem::path& path, const RealMatrix& a, std::uint32_t flags) {
    if (a.rows() != a.cols()) throw ConfigError("write_matrix_binary: matrix must be square");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(magic.data(), magic.size());
    write_pod(out, matrix_file_version);
    write_pod(out, static_cast<std::uint32_t>(a.rows()));
    write_pod(out, flags);
    out.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(sizeof(double) * a.rows() * a.cols()));
    if (!out) throw Error("write failed: " + path.string());
}

void write_matrix_text(const std::filesystem::path& path, const RealMatrix& a) {
    if (a.rows() != a.cols()) throw ConfigError("write_matrix_text: matrix must be square");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(17);
    out << a.rows() << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out << (j ? " " : "") << a(i, j);
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<complex> read_shifts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<complex> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double re = 0.0, im = 0.0;
        if (!(ls >> re)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error("bad shift on line " + std::to_string(lineno) + " of " + path.string());
        }
        if (!(ls >> im)) im = 0.0;
        out.emplace_back(re, im);
    }
    return out;
}

} // namespace hsrq
