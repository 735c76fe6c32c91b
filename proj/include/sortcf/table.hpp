#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sortcf/error.hpp"

namespace sortcf {

// Policy for Q-, the lower anchor derived from the expected H,H count under
// random matching. Floor is faithful to integer count data; Continuous keeps
// Q as-is, which is the right reading for weighted (real-valued) tables and
// makes the preservation invariants exact.
enum class QMode { Floor, Continuous };

inline double q_minus(double q, QMode mode) {
  return mode == QMode::Floor ? std::floor(q) : q;
}

inline const char* to_string(QMode mode) {
  return mode == QMode::Floor ? "floor" : "continuous";
}

// n x m table of nonnegative real couple counts. Rows are husband categories,
// columns are wife categories, both ascending in the assorted trait.
class ContingencyTable {
 public:
  ContingencyTable(std::vector<std::string> row_labels,
                   std::vector<std::string> col_labels,
                   std::vector<double> cells, std::string period_tag = "")
      : row_labels_(std::move(row_labels)),
        col_labels_(std::move(col_labels)),
        cells_(std::move(cells)),
        period_(std::move(period_tag)) {
    validate();
  }

  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  bool square() const { return rows() == cols(); }

  double at(std::size_t i, std::size_t j) const { return cells_[i * cols() + j]; }

  const std::vector<double>& cells() const { return cells_; }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  const std::string& period() const { return period_; }

  double grand_total() const {
    double total = 0.0;
    for (double c : cells_) total += c;
    return total;
  }

  ContingencyTable with_period(std::string period) const {
    ContingencyTable copy = *this;
    copy.period_ = std::move(period);
    return copy;
  }

 private:
  void validate() const {
    if (rows() < 2 || cols() < 2)
      throw DataError("contingency table needs at least 2 rows and 2 columns");
    if (cells_.size() != rows() * cols())
      throw DataError("cell count does not match " + std::to_string(rows()) +
                      "x" + std::to_string(cols()) + " layout");
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j) {
        const double c = at(i, j);
        if (!std::isfinite(c) || c < 0.0)
          throw DataError("negative or non-finite cell at row '" +
                          row_labels_[i] + "', column '" + col_labels_[j] + "'");
      }
    if (!(grand_total() > 0.0))
      throw DataError("grand total must be positive");
    check_labels(row_labels_, "row");
    check_labels(col_labels_, "column");
  }

  static void check_labels(const std::vector<std::string>& labels,
                           const char* axis) {
    std::set<std::string> seen;
    for (const auto& label : labels) {
      if (label.empty())
        throw DataError(std::string("empty ") + axis + " label");
      if (!seen.insert(label).second)
        throw DataError(std::string("duplicate ") + axis + " label '" + label +
                        "'");
    }
  }

  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::vector<double> cells_;
  std::string period_;
};

// Row totals R, column totals C, and the shared grand total.
struct Margins {
  std::vector<double> row_totals;
  std::vector<double> col_totals;
  double grand_total = 0.0;

  Margins(std::vector<double> rows, std::vector<double> cols)
      : row_totals(std::move(rows)), col_totals(std::move(cols)) {
    double row_sum = 0.0, col_sum = 0.0;
    for (double r : row_totals) {
      if (!std::isfinite(r) || r < 0.0)
        throw DataError("margins must be nonnegative and finite");
      row_sum += r;
    }
    for (double c : col_totals) {
      if (!std::isfinite(c) || c < 0.0)
        throw DataError("margins must be nonnegative and finite");
      col_sum += c;
    }
    const double scale = std::max(std::abs(row_sum), std::abs(col_sum));
    if (std::abs(row_sum - col_sum) > 1e-9 * std::max(scale, 1.0))
      throw DataError("row totals and column totals disagree: " +
                      std::to_string(row_sum) + " vs " + std::to_string(col_sum));
    grand_total = row_sum;
  }
};

inline Margins margins(const ContingencyTable& z) {
  std::vector<double> r(z.rows(), 0.0), c(z.cols(), 0.0);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) {
      r[i] += z.at(i, j);
      c[j] += z.at(i, j);
    }
  return Margins(std::move(r), std::move(c));
}

inline bool margins_equal_exact(const Margins& a, const Margins& b) {
  return a.row_totals == b.row_totals && a.col_totals == b.col_totals;
}

// 2x2 aggregate of a table at a dichotomizing split, with the quantities the
// LL indicator and the closed-form counterfactual need: Q (expected H,H count
// under random matching), its Q- anchor, and the Frechet bounds on the H,H
// cell given the margins.
struct Dichotomized2x2 {
  // Row-major: [0]=L,L  [1]=L,H  [2]=H,L  [3]=H,H.
  std::array<double, 4> cells{};
  double q = 0.0;
  double q_floor = 0.0;
  double hh_max = 0.0;
  double hh_min = 0.0;
  std::size_t split_row = 0;  // i: rows 1..i form the L block (1-based)
  std::size_t split_col = 0;  // j: columns 1..j form the L block (1-based)
  QMode mode = QMode::Floor;

  double ll_cell() const { return cells[0]; }
  double lh_cell() const { return cells[1]; }
  double hl_cell() const { return cells[2]; }
  double hh_cell() const { return cells[3]; }

  double row_h_total() const { return cells[2] + cells[3]; }
  double col_h_total() const { return cells[1] + cells[3]; }
  double grand_total() const {
    return cells[0] + cells[1] + cells[2] + cells[3];
  }
};

inline Dichotomized2x2 dichotomize(const ContingencyTable& z, std::size_t i,
                                   std::size_t j, QMode mode = QMode::Floor) {
  if (i < 1 || i > z.rows() - 1)
    throw DataError("row split " + std::to_string(i) + " out of range 1.." +
                    std::to_string(z.rows() - 1));
  if (j < 1 || j > z.cols() - 1)
    throw DataError("column split " + std::to_string(j) + " out of range 1.." +
                    std::to_string(z.cols() - 1));

  Dichotomized2x2 d;
  d.split_row = i;
  d.split_col = j;
  d.mode = mode;
  for (std::size_t k = 0; k < z.rows(); ++k)
    for (std::size_t l = 0; l < z.cols(); ++l) {
      const std::size_t block = (k >= i ? 2u : 0u) + (l >= j ? 1u : 0u);
      d.cells[block] += z.at(k, l);
    }
  const double n = d.grand_total();
  const double row_h = d.row_h_total();
  const double col_h = d.col_h_total();
  d.q = row_h * col_h / n;
  d.q_floor = q_minus(d.q, mode);
  d.hh_max = std::min(row_h, col_h);
  d.hh_min = std::max(0.0, row_h + col_h - n);
  return d;
}

// Share of homogamous couples: diagonal mass over total mass.
inline double homogamy_share(const ContingencyTable& z) {
  if (!z.square())
    throw DataError("homogamy share needs a square table, got " +
                    std::to_string(z.rows()) + "x" + std::to_string(z.cols()));
  double diag = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) diag += z.at(i, i);
  return diag / z.grand_total();
}

namespace detail {

inline void check_partition(const std::vector<std::vector<std::size_t>>& groups,
                            std::size_t count, const char* axis) {
  std::size_t next = 0;
  for (const auto& group : groups) {
    if (group.empty())
      throw DataError(std::string("empty ") + axis + " group in partition");
    for (std::size_t idx : group) {
      if (idx != next)
        throw DataError(std::string(axis) +
                        " partition is not contiguous and covering");
      ++next;
    }
  }
  if (next != count)
    throw DataError(std::string(axis) + " partition does not cover all " +
                    std::to_string(count) + " categories");
}

inline std::string merged_label(const std::vector<std::string>& labels,
                                const std::vector<std::size_t>& group) {
  std::string out;
  for (std::size_t idx : group) {
    if (!out.empty()) out += "+";
    out += labels[idx];
  }
  return out;
}

}  // namespace detail

// Aggregates neighboring categories. Groups are ordered partitions of the
// axis indices into contiguous blocks (0-based).
inline ContingencyTable merge_categories(
    const ContingencyTable& z,
    const std::vector<std::vector<std::size_t>>& row_groups,
    const std::vector<std::vector<std::size_t>>& col_groups) {
  detail::check_partition(row_groups, z.rows(), "row");
  detail::check_partition(col_groups, z.cols(), "column");

  const std::size_t n = row_groups.size();
  const std::size_t m = col_groups.size();
  std::vector<std::string> row_labels(n), col_labels(m);
  for (std::size_t a = 0; a < n; ++a)
    row_labels[a] = detail::merged_label(z.row_labels(), row_groups[a]);
  for (std::size_t b = 0; b < m; ++b)
    col_labels[b] = detail::merged_label(z.col_labels(), col_groups[b]);

  std::vector<double> cells(n * m, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      double sum = 0.0;
      for (std::size_t k : row_groups[a])
        for (std::size_t l : col_groups[b]) sum += z.at(k, l);
      cells[a * m + b] = sum;
    }
  return ContingencyTable(std::move(row_labels), std::move(col_labels),
                          std::move(cells), z.period());
}

// The two-block partition {1..count_first}, {rest}; dichotomize() agreement
// helper used by tests and the merge demos.
inline std::vector<std::vector<std::size_t>> dichotomy_groups(
    std::size_t count, std::size_t count_first) {
  std::vector<std::vector<std::size_t>> groups(2);
  for (std::size_t k = 0; k < count; ++k)
    groups[k < count_first ? 0 : 1].push_back(k);
  return groups;
}

}  // namespace sortcf
