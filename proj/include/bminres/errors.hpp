#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bminres {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The initial block residual does not have full column rank.
class RankDeficientStart : public Error {
 public:
  RankDeficientStart(std::size_t column, double diag, double column_norm)
      : Error("rank-deficient starting block: column " + std::to_string(column) +
              " has R diagonal " + std::to_string(diag) + " against column norm " +
              std::to_string(column_norm)),
        column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// A random replacement vector vanished after orthogonalization (space exhausted).
class ReplacementExhausted : public Error {
 public:
  using Error::Error;
};

/// A diagonal entry of the triangular factor of the banded Hessenberg matrix vanished.
class SingularR : public Error {
 public:
  using Error::Error;
};

/// Non-positive pivot encountered during incomplete Cholesky.
class PivotBreakdown : public Error {
 public:
  PivotBreakdown(std::size_t row, double pivot)
      : Error("IC(0) pivot breakdown at row " + std::to_string(row) + " (pivot " +
              std::to_string(pivot) + ")"),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

}  // namespace bminres
