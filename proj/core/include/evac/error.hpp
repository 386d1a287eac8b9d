#pragma once

#include <stdexcept>
#include <string>

namespace evac {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 1; anything else escaping a command is a bug.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
  public:
    using Error::Error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// An operation was invoked in the wrong lifecycle state.
class StateError : public Error {
  public:
    using Error::Error;
};

class NoPathError : public Error {
  public:
    using Error::Error;
};

/// Graph, configuration, or file content violates a structural invariant.
class InvariantError : public Error {
  public:
    using Error::Error;
};

/// A circuit slot (parameter or feature) has no value bound to it.
class BindingError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace evac
