#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace sortcf {

// Root of the library error hierarchy. DataError covers malformed inputs
// (parsing, validation, dimension mismatches); MethodError covers numeric
// failures of the counterfactual engines and indicators.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class MethodError : public Error {
 public:
  using Error::Error;
};

// Parse failure with 1-based line/column diagnostics.
class ParseError : public DataError {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : DataError(msg + " (line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

inline std::string split_suffix(std::size_t i, std::size_t j) {
  if (i == 0 && j == 0) return "";
  return " at split (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")";
}

// %g rendering for error messages; std::to_string flattens small magnitudes.
inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// The LL indicator is undefined: max attainable H,H count equals the lower
// anchor (zero margin, or Q- hitting the Frechet upper bound).
class DegenerateMargins : public MethodError {
 public:
  DegenerateMargins(const std::string& msg, std::size_t i = 0, std::size_t j = 0)
      : MethodError("DegenerateMargins: " + msg + detail::split_suffix(i, j)),
        split_row_(i),
        split_col_(j) {}

  std::size_t split_row() const { return split_row_; }
  std::size_t split_col() const { return split_col_; }

 private:
  std::size_t split_row_;
  std::size_t split_col_;
};

// Source table sorts below random matching (N_HH < Q-) at some split.
class NegativeSortingSource : public MethodError {
 public:
  NegativeSortingSource(const std::string& msg, std::size_t i = 0,
                        std::size_t j = 0)
      : MethodError("NegativeSortingSource: " + msg +
                    detail::split_suffix(i, j)),
        split_row_(i),
        split_col_(j) {}

  std::size_t split_row() const { return split_row_; }
  std::size_t split_col() const { return split_col_; }

 private:
  std::size_t split_row_;
  std::size_t split_col_;
};

// Source head-room min(N_H., N_.H) - Q- is zero: the ratio term is undefined.
class DegenerateSource : public MethodError {
 public:
  DegenerateSource(const std::string& msg, std::size_t i = 0, std::size_t j = 0)
      : MethodError("DegenerateSource: " + msg + detail::split_suffix(i, j)),
        split_row_(i),
        split_col_(j) {}

  std::size_t split_row() const { return split_row_; }
  std::size_t split_col() const { return split_col_; }

 private:
  std::size_t split_row_;
  std::size_t split_col_;
};

// Cell reconstruction produced a genuinely negative count: the requested
// counterfactual is infeasible as a nonnegative table.
class NegativeCell : public MethodError {
 public:
  NegativeCell(const std::string& msg, std::size_t row = 0, std::size_t col = 0)
      : MethodError("NegativeCell: " + msg), row_(row), col_(col) {}

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

// Iteration cap hit before the margin deviation dropped below tolerance.
class NotConverged : public MethodError {
 public:
  NotConverged(const std::string& msg, double final_deviation)
      : MethodError("NotConverged: " + msg), final_deviation_(final_deviation) {}

  double final_deviation() const { return final_deviation_; }

 private:
  double final_deviation_;
};

// A positive target total sits over an all-zero source row or column.
class InfeasibleZeroPattern : public MethodError {
 public:
  explicit InfeasibleZeroPattern(const std::string& msg)
      : MethodError("InfeasibleZeroPattern: " + msg) {}
};

}  // namespace sortcf
