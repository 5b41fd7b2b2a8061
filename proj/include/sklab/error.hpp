// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sklab {

enum class ErrorKind
{
    invalid_argument,
    validation,
    non_finite,
    stability,
    singular,
    stiffness,
    blow_up,
    audit,
    io,
};

class Error : public std::runtime_error
{
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Raised when a matrix is singular or too ill-conditioned to invert.
class SingularMatrixError : public Error
{
  public:
    SingularMatrixError(double condition, const std::string& what)
        : Error(ErrorKind::singular, what), condition_(condition)
    {
    }
    double condition() const noexcept { return condition_; }

  private:
    double condition_;
};

/// Raised when a trajectory produces non-finite state.
class BlowUpError : public Error
{
  public:
    BlowUpError(double time, const std::string& what)
        : Error(ErrorKind::blow_up, what), time_(time)
    {
    }
    double time() const noexcept { return time_; }

  private:
    double time_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw Error(ErrorKind::invalid_argument, what);
}

}  // namespace sklab
