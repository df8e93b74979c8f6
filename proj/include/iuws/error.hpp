#pragma once

#include <stdexcept>
#include <string>

namespace iuws {

/// Failure categories. The CLI maps validation-type kinds to exit code 2 and
/// solver-type kinds to exit code 3.
enum class ErrorKind {
    invalid_point,
    domain_error,
    empty_domain,
    geometry_overflow,
    invalid_pole,
    degenerate_target,
    degenerate_input,
    invalid_start,
    validation,
    no_convergence,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    bool is_solver_failure() const noexcept { return kind_ == ErrorKind::no_convergence; }

private:
    ErrorKind kind_;
};

/// Raised when an iterative method hits its iteration cap.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double residual, long iterations)
        : Error(ErrorKind::no_convergence, what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double residual_;
    long iterations_;
};

}  // namespace iuws
