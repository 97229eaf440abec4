// errors.hpp — exception taxonomy shared by all modules
#pragma once

#include <stdexcept>
#include <string>

namespace modal {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition or input-contract violation (bad dimensions, non-Hermitian input, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Requested object exceeds the configured maximum total dimension.
struct SizeError : Error {
    using Error::Error;
};

// All eigenvalue mass fell below the null cutoff; no ontic states remain.
struct DegenerateStateError : Error {
    using Error::Error;
};

// A transition-matrix diagonal went negative: the one-step expansion is no
// longer a probability assignment and the effective description is invalid
// at this step size.
struct BreakdownError : Error {
    explicit BreakdownError(const std::string& msg, int column_label = -1)
        : Error(msg), label(column_label) {}
    int label;
};

// Chain composition over matrices whose label sets or time stamps do not line up.
struct CompositionError : Error {
    using Error::Error;
};

// An operation that needs at least one classified member got none.
struct EmptyEnsembleError : Error {
    using Error::Error;
};

}  // namespace modal
