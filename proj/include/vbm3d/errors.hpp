#pragma once

#include <stdexcept>
#include <string>

namespace vbm3d {

// Invalid parameters, profiles, or command-line usage. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing/unreadable/unwritable files. CLI maps this to exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file contents (bad magic, truncated raster, dimension mismatch).
struct FormatError : IoError {
    using IoError::IoError;
};

}  // namespace vbm3d
