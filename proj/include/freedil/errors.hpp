#pragma once

#include <stdexcept>
#include <string>

namespace freedil {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NotPsdError : public Error {
public:
    NotPsdError(const std::string& what, double eigenvalue)
        : Error(what), eigenvalue_(eigenvalue) {}
    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

class NotContractionError : public Error {
public:
    NotContractionError(const std::string& what, double norm)
        : Error(what), norm_(norm) {}
    double norm() const noexcept { return norm_; }

private:
    double norm_;
};

class InvalidStateError : public Error {
public:
    using Error::Error;
};

class DoubleCommutationError : public Error {
public:
    DoubleCommutationError(const std::string& what, int first, int second, double residual)
        : Error(what), first_(first), second_(second), residual_(residual) {}
    int first() const noexcept { return first_; }
    int second() const noexcept { return second_; }
    double residual() const noexcept { return residual_; }

private:
    int first_;
    int second_;
    double residual_;
};

// A request outside a construction's exactness or combinatorial budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

class NotUnitaryError : public Error {
public:
    using Error::Error;
};

// Malformed input files, bad scenarios.
class IngestError : public Error {
public:
    using Error::Error;
};

} // namespace freedil
