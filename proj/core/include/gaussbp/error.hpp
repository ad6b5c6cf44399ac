#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gaussbp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution's total mass vanished (disjoint supports, everything
/// shifted off-grid, or an all-zero input).
class ZeroMass : public Error {
 public:
  struct Edge {
    std::size_t factor;
    std::size_t variable;
    bool to_variable;
  };

  explicit ZeroMass(const std::string& what) : Error(what) {}
  ZeroMass(const std::string& what, Edge edge);

  const std::optional<Edge>& edge() const noexcept { return edge_; }

 private:
  std::optional<Edge> edge_;
};

class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class BadPrior : public Error {
 public:
  using Error::Error;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

class NotATree : public Error {
 public:
  using Error::Error;
};

/// GBP finished with a variable that never received any evidence.
class AllVague : public Error {
 public:
  using Error::Error;
};

class InsufficientDepth : public Error {
 public:
  using Error::Error;
};

class TreeTooLarge : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroDisparity : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gaussbp
