#pragma once

#include <stdexcept>
#include <string>

namespace freshrank {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Bad input data or configuration (CLI exit code 1).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error(message) {}
};

// Filesystem / stream failures (CLI exit code 2).
class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(message) {}
};

class EmptyInventory : public ValidationError {
public:
    EmptyInventory() : ValidationError("inventory must contain at least one product") {}
};

class DuplicateProductId : public ValidationError {
public:
    explicit DuplicateProductId(const std::string& id)
        : ValidationError("duplicate product id: " + id) {}
};

class UnknownProduct : public ValidationError {
public:
    explicit UnknownProduct(const std::string& id)
        : ValidationError("product id not in inventory: " + id) {}
};

class InvalidWindowCapacity : public ValidationError {
public:
    explicit InvalidWindowCapacity(int capacity)
        : ValidationError("window capacity must be >= 1, got " + std::to_string(capacity)) {}
};

class LengthMismatch : public ValidationError {
public:
    LengthMismatch(std::size_t lhs, std::size_t rhs)
        : ValidationError("score vector length mismatch: " + std::to_string(lhs) +
                          " vs " + std::to_string(rhs)) {}
};

class KindMismatch : public ValidationError {
public:
    explicit KindMismatch(const std::string& detail)
        : ValidationError("score vector kind mismatch: " + detail) {}
};

class ForeignUserEvent : public ValidationError {
public:
    ForeignUserEvent(const std::string& expected, const std::string& got)
        : ValidationError("event belongs to user '" + got + "', expected '" + expected + "'") {}
};

class EmptyList : public ValidationError {
public:
    EmptyList() : ValidationError("recommendation list is empty (t = 0)") {}
};

class IndivisibleBatch : public ValidationError {
public:
    IndivisibleBatch(std::uint64_t n, std::uint64_t h)
        : ValidationError("batch size " + std::to_string(h) + " does not divide " +
                          std::to_string(n)) {}
};

class OutOfOrderEvents : public ValidationError {
public:
    explicit OutOfOrderEvents(std::size_t line_no)
        : ValidationError("event timestamps decrease at record " + std::to_string(line_no)) {}
};

class ParseError : public ValidationError {
public:
    ParseError(std::size_t line_no, const std::string& detail)
        : ValidationError("parse error at line " + std::to_string(line_no) + ": " + detail),
          line_no_(line_no) {}

    std::size_t line_no() const { return line_no_; }

private:
    std::size_t line_no_;
};

class ConfigError : public ValidationError {
public:
    explicit ConfigError(const std::string& detail)
        : ValidationError("invalid config: " + detail) {}
};

class InvalidArgument : public ValidationError {
public:
    explicit InvalidArgument(const std::string& detail) : ValidationError(detail) {}
};

}  // namespace freshrank
