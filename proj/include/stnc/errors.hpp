// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace stnc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Config file is syntactically malformed (bad key, bad value, duplicate).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A structurally valid input violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Fading shape parameters must be positive integers; the closed forms
/// (residue orders, finite sums) are only defined there.
class NonIntegerFadingParameter : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The code-correlation matrix could not be inverted (pivot underflow).
class SingularCorrelation : public Error {
 public:
  using Error::Error;
};

/// Two branch pole ratios m_n/a_n collide; the partial-fraction form is
/// invalid. `state` identifies the offending decoding state when the error
/// surfaces from a full network sum (-1 otherwise).
class CoincidentPoles : public Error {
 public:
  explicit CoincidentPoles(const std::string& what, long state = -1)
      : Error(what), state_(state) {}
  long state() const { return state_; }

 private:
  long state_;
};

/// A computed probability fell outside [0,1] by more than round-off, or an
/// internal cross-check (e.g. PDF normalization) failed.
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

/// The characteristic function decays too slowly for the requested
/// inversion tolerance; the achievable tolerance is reported in the message.
class TruncationFailure : public Error {
 public:
  TruncationFailure(const std::string& what, double achievable)
      : Error(what), achievable_(achievable) {}
  double achievable_tolerance() const { return achievable_; }

 private:
  double achievable_;
};

}  // namespace stnc
