#pragma once

#include <stdexcept>
#include <string>

namespace twistgap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or parameter outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters fall in a phase the requested operation does not cover.
class PhaseError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A size cap (enumeration sites, transfer width, underflow guard) was exceeded.
class ResourceCapError : public Error {
public:
    ResourceCapError(const std::string& what, long long cap)
        : Error(what), cap_(cap) {}
    long long cap() const noexcept { return cap_; }

private:
    long long cap_;
};

/// Adaptive quadrature did not reach the requested tolerance within its node budget.
class QuadratureFailure : public Error {
public:
    QuadratureFailure(const std::string& what, double best_estimate, double error_bound)
        : Error(what), best_(best_estimate), err_(error_bound) {}
    double best_estimate() const noexcept { return best_; }
    double error_bound() const noexcept { return err_; }

private:
    double best_;
    double err_;
};

/// Character expansion tail is not small enough at the requested cutoff.
/// suggested_cutoff() is 0 when no adequate cutoff could be extrapolated.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, int suggested_cutoff)
        : Error(what), suggested_(suggested_cutoff) {}
    int suggested_cutoff() const noexcept { return suggested_; }

private:
    int suggested_;
};

/// An identity that must hold exactly (projector sums, probability bounds) failed,
/// which signals a truncation or quadrature fault upstream.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Monte Carlo chain never visited one of the two twist sectors.
class TunnelingError : public Error {
public:
    TunnelingError(const std::string& what, long long untwisted_visits, long long twisted_visits)
        : Error(what), untwisted_(untwisted_visits), twisted_(twisted_visits) {}
    long long untwisted_visits() const noexcept { return untwisted_; }
    long long twisted_visits() const noexcept { return twisted_; }

private:
    long long untwisted_;
    long long twisted_;
};

}  // namespace twistgap
