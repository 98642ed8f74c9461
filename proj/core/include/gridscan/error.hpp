// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_ERROR_HPP
#define GRIDSCAN_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridscan {

/// Malformed or inconsistent input data (files, predictions, configs).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text-format parse failure carrying the 1-based offending line.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Byte stream shorter than its header declares.
class TruncatedError : public DataError {
public:
    TruncatedError(std::size_t expected, std::size_t actual, const std::string& what,
                   const std::string& unit = "bytes")
        : DataError(what + ": expected " + std::to_string(expected) + " " + unit + ", got " +
                    std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gridscan

#endif  // GRIDSCAN_ERROR_HPP
