#pragma once

#include <filesystem>
#include <vector>

#include "hsrq/matrix.hpp"

namespace hsrq {

// Binary layout: "HSRQ", u32 version (1), u32 n, u32 flags, then n*n little-endian
// doubles column-major. Text layout: n followed by n*n values, row by row.
inline constexpr std::uint32_t matrix_file_version = 1;
inline constexpr std::uint32_t matrix_flag_hessenberg = 1u;

RealMatrix read_matrix(const std::filesystem::path& path);
void write_matrix_binary(const std::filesystem::path& path, const RealMatrix& a, std::uint32_t flags = 0);
void write_matrix_text(const std::filesystem::path& path, const RealMatrix& a);

// One shift per line: "re" or "re im". Blank lines and '#' comments are skipped.
std::vector<complex> read_shifts(const std::filesystem::path& path);

} // namespace hsrq
