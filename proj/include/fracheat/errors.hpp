#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

/// Input outside the admissible parameter range (N <= 2s, lambda > Hardy constant, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A quadrature, root finder or time stepper failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Lookup outside a tabulated range.
struct OutOfTableError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Tabulated data that violates its own invariants (non-positive, NaN).
struct CorruptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exponent sits inside the unclassified band around p_+.
struct AmbiguityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Construction requested outside the regime where it exists.
struct RegimeError : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace fracheat
