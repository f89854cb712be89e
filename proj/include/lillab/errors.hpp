#pragma once

#include <stdexcept>
#include <string>

namespace lillab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression text did not conform to the grammar; carries the byte offset.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside the declared domain, or an atom used where undefined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A construction invariant failed (non-monotone, non-positive, pair order).
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Quadrature or root search failed to converge, or a search was infeasible.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace lillab
