#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsrq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters: tile sizes, workspace caps, eigenvalue selections, fractions.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input violates the Hessenberg/unreduced structure, or a rotation had two zero pivots.
class StructureError : public Error {
public:
    StructureError(const std::string& what, std::size_t row, std::size_t shift)
        : Error(what + " (row " + std::to_string(row) + ", shift " + std::to_string(shift) + ")"),
          row_(row), shift_(shift) {}

    std::size_t row() const { return row_; }
    std::size_t shift() const { return shift_; }

private:
    std::size_t row_;
    std::size_t shift_;
};

class SingularError : public Error {
public:
    SingularError(std::size_t index, std::size_t shift)
        : Error("singular triangular factor at index " + std::to_string(index) + ", shift " +
                std::to_string(shift)),
          index_(index), shift_(shift) {}

    std::size_t index() const { return index_; }
    std::size_t shift() const { return shift_; }

private:
    std::size_t index_;
    std::size_t shift_;
};

class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace hsrq
