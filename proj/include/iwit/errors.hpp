// errors.hpp — exception types shared by all iwit modules.

#pragma once

#include <stdexcept>
#include <string>

namespace iwit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- linear algebra -----------------------------------------------------------

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotHermitian : Error {
    using Error::Error;
};

struct ConvergenceFailure : Error {
    using Error::Error;
};

// -- measurements and ensembles ----------------------------------------------

struct NotPositive : Error {
    using Error::Error;
};

struct NotNormalized : Error {
    using Error::Error;
};

struct GammaOutOfRange : Error {
    using Error::Error;
};

struct NotProductLabeled : Error {
    using Error::Error;
};

struct TraceNotOne : Error {
    using Error::Error;
};

struct EmptyBlock : Error {
    using Error::Error;
};

struct NotMub : Error {
    using Error::Error;
};

struct MuOutOfRange : Error {
    using Error::Error;
};

struct LabelMismatch : Error {
    using Error::Error;
};

// -- solvers -------------------------------------------------------------------

struct MaxIterExceeded : Error {
    MaxIterExceeded(const std::string& what, double best_value, double residual)
        : Error(what), best_value(best_value), residual(residual) {}
    double best_value;
    double residual;
};

struct LambdaOutOfRange : Error {
    using Error::Error;
};

// -- witnesses ------------------------------------------------------------------

struct NoGap : Error {
    using Error::Error;
};

struct DeltaOutOfRange : Error {
    using Error::Error;
};

struct ConstantWitness : Error {
    using Error::Error;
};

// -- mub family -------------------------------------------------------------------

struct TrivialMu : Error {
    using Error::Error;
};

struct DegenerateInput : Error {
    using Error::Error;
};

struct NoGapForMu : Error {
    using Error::Error;
};

struct ThetaOutOfRange : Error {
    using Error::Error;
};

// -- i/o ----------------------------------------------------------------------------

struct JsonError : Error {
    using Error::Error;
};

}  // namespace iwit
