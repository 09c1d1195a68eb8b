#pragma once

#include <stdexcept>
#include <string>

namespace ompc {

// Error taxonomy shared by all stages. The CLI maps InputError-derived
// exceptions to exit code 2 and DecodeError to exit code 3.

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
  ParseError(const std::string& what, int line)
    : InputError("line " + std::to_string(line) + ": " + what), line_(line)
  {}
  int line() const { return line_; }

private:
  int line_;
};

class DomainError : public InputError {
public:
  using InputError::InputError;
};

class IoError : public InputError {
public:
  using InputError::InputError;
};

class PackingError : public InputError {
public:
  using InputError::InputError;
};

// Raised by rasterization when a component's depth range does not fit the
// 8-bit geometry video; the caller splits the component and retries.
class SplitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ompc
