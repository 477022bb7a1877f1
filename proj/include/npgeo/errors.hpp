#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace npgeo {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based character offset.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class UnknownIdentifier : public ParseError {
public:
  UnknownIdentifier(const std::string& name, std::size_t position)
      : ParseError("unknown identifier '" + name + "'", position), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

/// Chart config problems; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// Evaluation outside the domain of a function or chart, or a singular metric.
class DomainError : public Error {
public:
  using Error::Error;
};

/// An operation's hypothesis does not hold at the supplied data.
class PreconditionError : public Error {
public:
  using Error::Error;
};

}  // namespace npgeo
