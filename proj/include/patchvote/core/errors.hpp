// patchvote/core/errors.hpp — exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace pv {

/// Bad user-facing configuration (mismatched dimensions, out-of-range
/// parameters, unknown object ids). Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem / stream failures. Maps to CLI exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structurally broken file content (bad magic, version, truncation).
struct FormatError : IoError {
    using IoError::IoError;
    FormatError(const std::string& what, std::size_t offset)
        : IoError(what + " (at byte offset " + std::to_string(offset) + ")") {}
};

/// Non-positive or missing depth where a metric depth is required.
struct InvalidDepthError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace pv
