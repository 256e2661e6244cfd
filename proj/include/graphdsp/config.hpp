#pragma once

// Tolerances, backend selection, and the error hierarchy shared by every module.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace graphdsp {

using cplx = std::complex<double>;

/// Arithmetic used for Jordan structure and interpolation.
enum class Backend { numeric, exact };

inline std::string_view to_string(Backend b) { return b == Backend::exact ? "exact" : "numeric"; }

/// Every numerical threshold used by the library lives here. Operations take a
/// `const Tolerances&` defaulting to these values; the CLI overrides fields by name.
struct Tolerances {
    double trim = 1e-12;          // absolute; polynomial leading-coefficient trimming
    double cluster = 1e-8;        // relative eigenvalue clustering / rank decisions in the staircase
    double chain = 1e-8;          // chain residual, relative to ||A||
    double solve = 1e-9;          // interpolation residual
    double interp_cond = 1e14;    // confluent Vandermonde condition limit
    double inverse = 1e-10;       // |h(lambda)| > inverse * ||h|| for invertibility
    double rank = 1e-10;          // singular-value cutoff relative to sigma_max
    double lambda_sep = 1e-8;     // minimal separation of interpolation nodes
    double hermitian = 1e-13;     // relative ||A - A^H||_max for the Hermitian path
    double max_cond_v = 1e8;      // numeric bases with larger cond(V) are rejected
    double churn_threshold = 0.5; // s~_n >= threshold predicts churn

    /// Sets a field by name; returns false for unknown names.
    bool set(std::string_view name, double value) {
        if (name == "trim") trim = value;
        else if (name == "cluster") cluster = value;
        else if (name == "chain") chain = value;
        else if (name == "solve") solve = value;
        else if (name == "interp_cond") interp_cond = value;
        else if (name == "inverse") inverse = value;
        else if (name == "rank") rank = value;
        else if (name == "lambda_sep") lambda_sep = value;
        else if (name == "hermitian") hermitian = value;
        else if (name == "max_cond_v") max_cond_v = value;
        else if (name == "churn_threshold") churn_threshold = value;
        else return false;
        return true;
    }
};

/// Base of all library errors. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept = 0;
};

/// Bad input: shapes, ranges, file syntax, violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// A computation could not be completed to the required accuracy.
class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

class DecompositionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InterpolationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Raised when a filter has a zero at an eigenvalue of the shift.
class NonInvertibleError : public NumericalError {
public:
    NonInvertibleError(const std::string& what, cplx eigenvalue)
        : NumericalError(what), eigenvalue_(eigenvalue) {}
    cplx eigenvalue() const noexcept { return eigenvalue_; }

private:
    cplx eigenvalue_;
};

class RankDeficiencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace graphdsp
