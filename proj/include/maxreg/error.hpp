#pragma once

#include <stdexcept>
#include <string>

namespace maxreg {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Degenerate or unsupported domain geometry, or a grid too coarse for it.
class geometry_error : public error {
public:
  using error::error;
};

/// An argument outside the documented range of an operation.
class argument_error : public error {
public:
  using error::error;
};

/// Exponent hypotheses of a check are not satisfied.
class hypothesis_error : public error {
public:
  using error::error;
};

/// Malformed run configuration. `pointer` is a JSON pointer to the offending value.
class config_error : public error {
public:
  config_error(std::string pointer, const std::string& what)
      : error(pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

private:
  std::string pointer_;
};

} // namespace maxreg
