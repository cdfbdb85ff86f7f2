#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvcs {

/// Violated precondition on an argument (bad length, ratio out of range, ...).
class DomainError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// The reconstruction iterate stopped being finite.
class SolverError : public std::runtime_error
{
public:
  SolverError(std::string const &what, std::size_t iteration)
    : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")")
    , iteration_(iteration)
  {
  }

  std::size_t iteration() const noexcept { return iteration_; }

private:
  std::size_t iteration_;
};

/// File could not be read, written or parsed.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace tvcs
