#pragma once

#include <stdexcept>
#include <string>

namespace sifair {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query or constructor received an argument outside its domain
/// (unknown location id, zero grid dimension, empty value list, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A text file could not be parsed. The message names the file and line.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// A configuration or manifest failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition at runtime (e.g. assigning an
/// infeasible route plan, reporting a served request outside the batch).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace sifair
