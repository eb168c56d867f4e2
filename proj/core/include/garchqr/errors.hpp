#pragma once

#include <stdexcept>
#include <string>

namespace garchqr {

/// Input data failed validation (bad prices, non-finite values, bad CSV rows).
class IngestionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters fall outside the admissible set.
class ConstraintViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure in a solver (rank deficiency, singular system, degenerate fit).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace garchqr
