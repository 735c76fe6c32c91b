#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sortcf/error.hpp"
#include "sortcf/table.hpp"

namespace sortcf {

// (n-1) x (m-1) matrix of indicator values, one per dichotomizing split.
struct SortingMatrix {
  std::size_t source_rows = 0;  // n
  std::size_t source_cols = 0;  // m
  QMode mode = QMode::Floor;
  std::vector<double> values;  // row-major, (n-1) x (m-1)

  std::size_t rows() const { return source_rows - 1; }
  std::size_t cols() const { return source_cols - 1; }
  double at(std::size_t i, std::size_t j) const {
    return values[i * cols() + j];
  }
};

// Scalar indicator on a 2x2 aggregate: actual minus minimum over maximum
// minus minimum of the H,H cell given the margins. Under non-negative sorting
// (N_HH >= Q-) the minimum is Q-; below it the Frechet lower bound applies.
inline double ll_simplified(const Dichotomized2x2& d) {
  const double n_hh = d.hh_cell();
  const double hi = d.hh_max;
  const double lo = (n_hh >= d.q_floor) ? d.q_floor : d.hh_min;
  if (!(hi - lo > 0.0))
    throw DegenerateMargins(
        "indicator undefined, max attainable H,H count equals the minimum (" +
            detail::fmt_g(hi) + ")",
        d.split_row, d.split_col);
  return (n_hh - lo) / (hi - lo);
}

// Matrix-valued indicator: ll_simplified at every split (i, j).
inline SortingMatrix ll_generalized(const ContingencyTable& z,
                                    QMode mode = QMode::Floor) {
  SortingMatrix s;
  s.source_rows = z.rows();
  s.source_cols = z.cols();
  s.mode = mode;
  s.values.reserve((z.rows() - 1) * (z.cols() - 1));
  for (std::size_t i = 1; i <= z.rows() - 1; ++i)
    for (std::size_t j = 1; j <= z.cols() - 1; ++j)
      s.values.push_back(ll_simplified(dichotomize(z, i, j, mode)));
  return s;
}

}  // namespace sortcf
