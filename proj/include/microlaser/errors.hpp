#pragma once

#include <stdexcept>
#include <string>

namespace microlaser {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Iterative procedure did not meet its tolerance. Carries the achieved
/// error or residual so callers can decide whether to accept the result.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace microlaser
