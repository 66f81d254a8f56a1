#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccglearn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed surface syntax. `position` is a byte offset into the input.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& what)
      : Error("position " + std::to_string(position) + ": " + what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownConstant : public Error {
 public:
  explicit UnknownConstant(std::string name)
      : Error("unknown constant '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class TypeMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when a distribution over parses is requested but the chart has no
/// complete parse (or none with the requested logical form).
class NoParse : public Error {
 public:
  using Error::Error;
};

class EnumerationLimit : public Error {
 public:
  using Error::Error;
};

/// Bad input file contents (corpus, lexicon, ontology, model).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccglearn
