#pragma once

#include <stdexcept>
#include <string>

namespace curveclock {

/// Bad input files, malformed configs, unknown keys, missing paths.
/// Maps to process exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate geometry or numerically undefined results (zero area,
/// ambiguous ellipse, flat curve, degenerate clustering). Exit code 2.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace curveclock
