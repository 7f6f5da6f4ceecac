#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

// Base of everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes or index sets that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Input data violating a documented precondition or invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Two independent computations of the same quantity disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// A reconstruction or verification residual exceeded tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace qgraph
