#pragma once

#include <stdexcept>
#include <string>

namespace nlsphase {

// Process exit codes used by the CLI.
enum class ExitCode : int { ok = 0, validation = 2, numerical = 3, io = 4 };

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN, overflow, boundary contamination that invalidates a result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nlsphase
