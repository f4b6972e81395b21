#pragma once

#include <stdexcept>
#include <string>

namespace bbs {

// Base class for every precondition violation raised by this library.
// The what() string names the violated precondition; the CLI prints it
// verbatim and exits nonzero.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class AnchorUnresolvable : public Error {
 public:
  explicit AnchorUnresolvable(const std::string& msg) : Error(msg) {}
};

// Raised when the running maximum is infinite (open left boundary, or a
// periodic window with particle density above one half).
class CarrierUndefined : public Error {
 public:
  explicit CarrierUndefined(const std::string& msg) : Error(msg) {}
};

// Raised when the future minimum is infinite (periodic window with
// particle density above one half).
class InverseUndefined : public Error {
 public:
  explicit InverseUndefined(const std::string& msg) : Error(msg) {}
};

class SpanExhausted : public Error {
 public:
  explicit SpanExhausted(const std::string& msg) : Error(msg) {}
};

class SupercriticalRejection : public Error {
 public:
  explicit SupercriticalRejection(const std::string& msg) : Error(msg) {}
};

class EigenFailure : public Error {
 public:
  explicit EigenFailure(const std::string& msg) : Error(msg) {}
};

// A user-supplied chain fails the symmetry / carrier-legality checks.
class SpecRejection : public Error {
 public:
  explicit SpecRejection(const std::string& msg) : Error(msg) {}
};

class NoTaggedParticle : public Error {
 public:
  explicit NoTaggedParticle(const std::string& msg) : Error(msg) {}
};

class InsufficientReplicas : public Error {
 public:
  explicit InsufficientReplicas(const std::string& msg) : Error(msg) {}
};

}  // namespace bbs
