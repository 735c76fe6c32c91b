#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sortcf/error.hpp"
#include "sortcf/ll.hpp"
#include "sortcf/table.hpp"

namespace sortcf {

// A constructed table that carries sorting from one period and availability
// (margins) from another.
struct CounterfactualTable {
  ContingencyTable table;
  std::string sorting_source_tag;
  std::string availability_source_tag;
  std::string method_tag;  // "nm" or "ipf"
};

namespace detail {

// Closed-form counterfactual H,H count for one dichotomized subproblem:
// the source's rank within its own head-room, rescaled onto the target's
// head-room above the target's Q- anchor.
inline double nm_counterfactual_hh(const Dichotomized2x2& source,
                                   double target_row_h, double target_col_h,
                                   double target_total) {
  const double source_hh = source.hh_cell();
  if (source_hh < source.q_floor)
    throw NegativeSortingSource(
        "source H,H count " + detail::fmt_g(source_hh) +
            " falls below the random-matching anchor " +
            detail::fmt_g(source.q_floor),
        source.split_row, source.split_col);
  const double source_headroom = source.hh_max - source.q_floor;
  if (!(source_headroom > 0.0))
    throw DegenerateSource(
        "source head-room min(N_H., N_.H) - Q- is zero, ratio undefined",
        source.split_row, source.split_col);

  const double target_q =
      q_minus(target_row_h * target_col_h / target_total, source.mode);
  const double target_headroom =
      std::min(target_row_h, target_col_h) - target_q;
  // Q <= min(R_H, C_H) holds for any valid margins, so Q- cannot exceed it.
  assert(target_headroom >= -1e-9 * std::max(target_total, 1.0));
  return (source_hh - source.q_floor) / source_headroom * target_headroom +
         target_q;
}

// Fills the remaining three cells of a 2x2 from the target margins and
// rejects genuinely negative counts (tiny negatives are numerical noise).
inline std::vector<double> assemble_2x2(double hh, double target_row_h,
                                        double target_col_h,
                                        double target_total) {
  const double hl = target_row_h - hh;
  const double lh = target_col_h - hh;
  const double ll = target_total - target_row_h - target_col_h + hh;
  std::vector<double> cells = {ll, lh, hl, hh};
  const double floor_tol = -1e-9 * target_total;
  static const char* kNames[] = {"L,L", "L,H", "H,L", "H,H"};
  for (std::size_t c = 0; c < 4; ++c) {
    if (cells[c] < floor_tol)
      throw NegativeCell("reconstructed " + std::string(kNames[c]) +
                             " cell is " + detail::fmt_g(cells[c]),
                         c / 2, c % 2);
    cells[c] = std::max(cells[c], 0.0);
  }
  return cells;
}

inline void verify_margins(const ContingencyTable& result,
                           const Margins& target) {
  const Margins got = margins(result);
  const double tol = 1e-9 * std::max(target.grand_total, 1.0);
  for (std::size_t i = 0; i < target.row_totals.size(); ++i)
    if (std::abs(got.row_totals[i] - target.row_totals[i]) > tol)
      throw MethodError("internal: reconstructed row total drifted from target");
  for (std::size_t j = 0; j < target.col_totals.size(); ++j)
    if (std::abs(got.col_totals[j] - target.col_totals[j]) > tol)
      throw MethodError("internal: reconstructed column total drifted from target");
}

}  // namespace detail

// Dichotomous case: closed-form solution, remaining cells from the target
// row/column totals. The result's LL equals the source's by construction.
inline CounterfactualTable nm_2x2(const Dichotomized2x2& source,
                                  const Margins& target,
                                  std::string sorting_tag = "",
                                  std::string availability_tag = "") {
  if (target.row_totals.size() != 2 || target.col_totals.size() != 2)
    throw DataError("nm_2x2 needs 2x2 target margins");
  if (!(target.grand_total > 0.0))
    throw DataError("target margins must have positive grand total");

  const double row_h = target.row_totals[1];
  const double col_h = target.col_totals[1];
  const double hh =
      detail::nm_counterfactual_hh(source, row_h, col_h, target.grand_total);
  std::vector<double> cells =
      detail::assemble_2x2(hh, row_h, col_h, target.grand_total);
  ContingencyTable table({"L", "H"}, {"L", "H"}, std::move(cells),
                         availability_tag);
  detail::verify_margins(table, target);
  return CounterfactualTable{std::move(table), std::move(sorting_tag),
                             std::move(availability_tag), "nm"};
}

// Multinomial case. Every dichotomized subproblem is solved independently;
// the solutions are the interior tail sums T[i][j] (mass in rows > i and
// columns > j), the boundary tails come from the target margins, and cells
// are recovered by inclusion-exclusion over the tail grid.
inline CounterfactualTable nm_transform(const ContingencyTable& source,
                                        const Margins& target,
                                        QMode mode = QMode::Floor,
                                        std::string availability_tag = "") {
  const std::size_t n = source.rows();
  const std::size_t m = source.cols();
  if (target.row_totals.size() != n || target.col_totals.size() != m)
    throw DataError("target margins do not match the " + std::to_string(n) +
                    "x" + std::to_string(m) + " source");
  if (!(target.grand_total > 0.0))
    throw DataError("target margins must have positive grand total");

  // tails[i][j] = counterfactual mass in rows > i, columns > j.
  std::vector<std::vector<double>> tails(n + 1,
                                         std::vector<double>(m + 1, 0.0));
  tails[0][0] = target.grand_total;
  for (std::size_t i = 1; i < n; ++i)
    tails[i][0] = tails[i - 1][0] - target.row_totals[i - 1];
  for (std::size_t j = 1; j < m; ++j)
    tails[0][j] = tails[0][j - 1] - target.col_totals[j - 1];
  // tails[n][.] and tails[.][m] stay zero.

  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < m; ++j) {
      const Dichotomized2x2 d = dichotomize(source, i, j, mode);
      tails[i][j] = detail::nm_counterfactual_hh(d, tails[i][0], tails[0][j],
                                                 target.grand_total);
    }

  std::vector<double> cells(n * m, 0.0);
  const double floor_tol = -1e-9 * target.grand_total;
  for (std::size_t k = 1; k <= n; ++k)
    for (std::size_t l = 1; l <= m; ++l) {
      double cell = tails[k - 1][l - 1] - tails[k][l - 1] - tails[k - 1][l] +
                    tails[k][l];
      if (cell < floor_tol)
        throw NegativeCell(
            "cell (" + source.row_labels()[k - 1] + ", " +
                source.col_labels()[l - 1] + ") reconstructs to " +
                detail::fmt_g(cell) + "; the counterfactual is infeasible",
            k - 1, l - 1);
      cells[(k - 1) * m + l - 1] = std::max(cell, 0.0);
    }

  ContingencyTable table(source.row_labels(), source.col_labels(),
                         std::move(cells), availability_tag);
  detail::verify_margins(table, target);
  return CounterfactualTable{std::move(table), source.period(),
                             std::move(availability_tag), "nm"};
}

}  // namespace sortcf
