#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace dwlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point lies within the boundary guard of its model domain.
struct BoundaryGuardError : Error {
    using Error::Error;
};

/// A map sent a point outside its model domain.
struct NotSelfMapError : Error {
    NotSelfMapError(const std::string& what, std::complex<double> input, std::size_t step = 0)
        : Error(what), input(input), step(step) {}
    std::complex<double> input;
    std::size_t step;  // 0 when not raised from a sequence run
};

struct ModelMismatchError : Error {
    using Error::Error;
};

struct NotAutomorphismError : Error {
    using Error::Error;
};

struct InvalidMapError : Error {
    using Error::Error;
};

/// Iteration did not settle within the allowed budget.
struct InconclusiveError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t pos) : Error(what + " at offset " + std::to_string(pos)), pos(pos) {}
    std::size_t pos;
};

/// A stability statement's hypotheses are not met; its conclusion is not asserted.
struct HypothesisViolation : Error {
    using Error::Error;
};

}  // namespace dwlab
