#pragma once

#include <stdexcept>
#include <string>

namespace nbs {

// Malformed input: shapes, masses, parameters out of range.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside the mathematical domain of an operation (e.g. alpha <= 1/2 for Dollard).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Potential is not (alpha,k) at infinity, or the requested derivative order is unavailable.
struct SeminormError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Orbit is not free (never separates, collides, or leaves the admissible domain).
struct NotFreeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A limit did not settle within the horizon / iteration budget.
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nbs
