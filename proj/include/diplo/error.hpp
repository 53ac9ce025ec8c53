#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diplo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Embedded or supplied map data violates a structural invariant.
class MapIntegrityError : public Error {
 public:
  using Error::Error;
};

// Unknown province, location or power name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed order text. `position` is the 0-based offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Operation called in a phase it does not apply to.
class PhaseError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (e.g. unvalidated orders).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Operation requires a finished (or unfinished) game.
class StateError : public Error {
 public:
  using Error::Error;
};

// A game record or protocol message does not follow the documented schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Predictions and gold orders do not describe the same phases.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// An agent connection could not be opened or broke down.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace diplo
