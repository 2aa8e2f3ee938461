#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hadamard {

/// Base of every error thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class dimension_error : public error {
public:
    using error::error;
};

/// An argument or entry lies outside the admissible domain (negative, NaN, ...).
class domain_error : public error {
public:
    using error::error;
};

/// A chain was called with the wrong number of operands or illegal parameters.
class contract_error : public error {
public:
    using error::error;
};

/// The resolvent was requested at or below the spectral radius.
class spectral_constraint_error : public error {
public:
    using error::error;
};

/// Elimination broke down or produced an inadmissible result.
class numerical_error : public error {
public:
    using error::error;
};

/// Values left the finite floating range.
class range_error : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t offset)
        : error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace hadamard
