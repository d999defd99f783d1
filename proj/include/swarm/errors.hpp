#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swarm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinate outside the grid.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the operation's domain (wall cell where free is required, n = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition contract.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Structurally malformed input (bad JSON document, mismatched dimensions).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The site generator could not satisfy the requested parameters.
class InfeasibleParams : public Error {
 public:
  explicit InfeasibleParams(const std::string& what, std::size_t index = 0)
      : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Not enough free cells to deploy the swarm.
class InsufficientSpace : public Error {
 public:
  using Error::Error;
};

}  // namespace swarm
