#pragma once

#include <stdexcept>
#include <string>

namespace qsens {

// Bad call arguments (shape mismatches, out-of-range sites, unusable samples).
// The CLI maps this to exit code 1.
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical contract was violated (non-Hermitian input where Hermitian is
// required, phase-degenerate fidelity, log-sensitivity at zero error).
// The CLI maps this to exit code 3.
struct contract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-system and parsing failures. The CLI maps this to exit code 2.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qsens
