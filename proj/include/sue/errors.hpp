#pragma once

#include <stdexcept>
#include <string>

namespace sue {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix required to be positive-definite failed its Cholesky factorization
/// (or is too ill-conditioned to use).
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// A dispersion matrix has a non-positive diagonal entry, so no scale/correlation
/// split exists.
class DegenerateScale : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidIndex : public Error {
public:
    using Error::Error;
};

/// The requested operation (CDF evaluation or sampling) is not available for
/// the distribution's density generator.
class UnsupportedGenerator : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

/// Rejection sampling acceptance estimate fell below the guard threshold.
class LowAcceptance : public Error {
public:
    using Error::Error;
};

/// An integration routine exhausted its point budget far from the requested
/// tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A quadrature/grid support does not cover the effective support of the
/// integrand.
class SupportTruncated : public Error {
public:
    using Error::Error;
};

/// Malformed input file (model spec, data table, points table).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace sue
