#pragma once

#include <stdexcept>
#include <string>

namespace ppi {

// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: non-finite entries, bad shapes, unparseable JSON.
class InputError : public Error {
public:
    using Error::Error;
};

// Arguments that are individually well-formed but inconsistent with each other
// (overlapping frames, mismatched ambient dimensions, broken invariants).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// An operator failed a mathematical precondition (not a power partial
// isometry, family not star-commuting, ...).
class PredicateError : public Error {
public:
    using Error::Error;
};

// Decomposition finished but its reconstruction or bookkeeping does not check out.
class DecompositionError : public Error {
public:
    using Error::Error;
};

// Chain images lost orthonormality beyond the accepted deviation.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// A compressed operator is not of the form I ⊗ R.
class FormViolation : public Error {
public:
    FormViolation(const std::string& what, double defect)
        : Error(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

} // namespace ppi
