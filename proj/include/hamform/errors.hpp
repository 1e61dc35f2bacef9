#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hamform {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Constraint level at which a pipeline error arose, or -1.
  int level() const noexcept { return level_; }
  void set_level(int level) noexcept { level_ = level; }

 private:
  int level_ = -1;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset), message_(what) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : Error("unknown identifier '" + name + "' at byte " + std::to_string(offset)),
        name_(name),
        offset_(offset) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class ChartMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// An equation is not affine in the requested unknowns.
class NonAffine : public Error {
 public:
  NonAffine(const std::string& equation, std::size_t index)
      : Error("equation " + std::to_string(index) + " is not affine in the unknowns: " + equation),
        equation_(equation),
        index_(index) {}
  const std::string& equation() const noexcept { return equation_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::string equation_;
  std::size_t index_;
};

/// A restricted form fails to descend along the projection.
class NotBasic : public Error {
 public:
  using Error::Error;
};

/// A constraint reduces to a nonzero expression free of every unknown.
class Inconsistent : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hamform
