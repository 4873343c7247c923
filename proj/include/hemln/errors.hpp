#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hemln {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file could not be opened or read.
class FileError : public Error {
public:
    using Error::Error;
};

// An input file had malformed content; carries the offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line_no, const std::string& detail)
        : Error(path + ":" + std::to_string(line_no) + ": " + detail),
          path_(path), line_no_(line_no) {}

    const std::string& path() const { return path_; }
    std::size_t line_no() const { return line_no_; }

private:
    std::string path_;
    std::size_t line_no_;
};

// A structurally well-formed input violated a network invariant
// (node shared across layers, dangling coupling endpoint, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A coupling set was requested for a layer pair that has none.
class NoInterLayerError : public Error {
public:
    using Error::Error;
};

// A node/community membership lookup had no entry.
class MissingMembershipError : public Error {
public:
    using Error::Error;
};

// An exhaustive routine was asked to handle an instance beyond its bound.
class TooLargeError : public Error {
public:
    using Error::Error;
};

// Generator or algorithm parameters outside their documented domain.
class InvalidParamsError : public Error {
public:
    using Error::Error;
};

// Errors raised while parsing or validating a composition expression.
// `pos` is a 0-based character offset into the expression text.
class ExpressionError : public Error {
public:
    ExpressionError(const std::string& what, std::size_t pos)
        : Error(what + " (at offset " + std::to_string(pos) + ")"), pos_(pos) {}

    std::size_t pos() const { return pos_; }

private:
    std::size_t pos_;
};

class SyntaxError : public ExpressionError {
public:
    using ExpressionError::ExpressionError;
};

class UnknownLayerError : public ExpressionError {
public:
    using ExpressionError::ExpressionError;
};

// The step joins two layers with no declared coupling set.
class DisconnectedStepError : public ExpressionError {
public:
    using ExpressionError::ExpressionError;
};

// An operator subscript does not name the two layers it sits between.
class SubscriptMismatchError : public ExpressionError {
public:
    using ExpressionError::ExpressionError;
};

// Syntactically recognisable construct that the engine does not evaluate
// (e.g. parenthesised grouping).
class NotSupportedError : public ExpressionError {
public:
    using ExpressionError::ExpressionError;
};

} // namespace hemln
