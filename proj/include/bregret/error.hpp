#pragma once

#include <stdexcept>
#include <string>

namespace bregret {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Every grid point assigns zero likelihood to the observed training data.
class DegenerateEvidenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The operation is only defined for a narrower source class (e.g. binary).
class UnsupportedClassError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Brute-force oracle refused an instance above its enumeration limit.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace bregret
