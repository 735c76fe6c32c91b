#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sortcf/error.hpp"
#include "sortcf/nm.hpp"
#include "sortcf/table.hpp"

namespace sortcf {

struct IpfConfig {
  // Max absolute margin deviation, relative to the grand total.
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

// Alternating row/column rescaling onto the target margins (RAS). Preserves
// every local odds ratio of the source; zero cells stay zero.
inline CounterfactualTable ipf_fit(const ContingencyTable& source,
                                   const Margins& target,
                                   const IpfConfig& config = {},
                                   std::string availability_tag = "") {
  if (!(config.tolerance > 0.0))
    throw DataError("IPF tolerance must be positive");
  if (config.max_iterations < 1)
    throw DataError("IPF needs at least one iteration");
  const std::size_t n = source.rows();
  const std::size_t m = source.cols();
  if (target.row_totals.size() != n || target.col_totals.size() != m)
    throw DataError("target margins do not match the " + std::to_string(n) +
                    "x" + std::to_string(m) + " source");
  if (!(target.grand_total > 0.0))
    throw DataError("target margins must have positive grand total");

  // Structural feasibility: a positive target total over an all-zero line
  // can never be reached by rescaling.
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += source.at(i, j);
    if (s == 0.0 && target.row_totals[i] > 0.0)
      throw InfeasibleZeroPattern("row '" + source.row_labels()[i] +
                                  "' is all zero but its target total is " +
                                  std::to_string(target.row_totals[i]));
  }
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += source.at(i, j);
    if (s == 0.0 && target.col_totals[j] > 0.0)
      throw InfeasibleZeroPattern("column '" + source.col_labels()[j] +
                                  "' is all zero but its target total is " +
                                  std::to_string(target.col_totals[j]));
  }

  std::vector<double> cells = source.cells();
  auto cell = [&](std::size_t i, std::size_t j) -> double& {
    return cells[i * m + j];
  };

  double deviation = 0.0;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    // Rows first, then columns (deterministic sweep order).
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += cell(i, j);
      if (s > 0.0) {
        const double f = target.row_totals[i] / s;
        for (std::size_t j = 0; j < m; ++j) cell(i, j) *= f;
      } else if (target.row_totals[i] > 0.0) {
        // A zero-target column sweep emptied this row's entire support.
        throw InfeasibleZeroPattern(
            "row '" + source.row_labels()[i] +
            "' lost all mass to zero-target columns but its target total is " +
            std::to_string(target.row_totals[i]));
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cell(i, j);
      if (s > 0.0) {
        const double f = target.col_totals[j] / s;
        for (std::size_t i = 0; i < n; ++i) cell(i, j) *= f;
      } else if (target.col_totals[j] > 0.0) {
        throw InfeasibleZeroPattern(
            "column '" + source.col_labels()[j] +
            "' lost all mass to zero-target rows but its target total is " +
            std::to_string(target.col_totals[j]));
      }
    }

    // L-infinity margin deviation, normalized by the grand total.
    deviation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += cell(i, j);
      deviation = std::max(deviation, std::abs(s - target.row_totals[i]));
    }
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cell(i, j);
      deviation = std::max(deviation, std::abs(s - target.col_totals[j]));
    }
    deviation /= target.grand_total;
    if (deviation <= config.tolerance) {
      ContingencyTable table(source.row_labels(), source.col_labels(),
                             std::move(cells), availability_tag);
      return CounterfactualTable{std::move(table), source.period(),
                                 std::move(availability_tag), "ipf"};
    }
  }
  throw NotConverged("margin deviation " + detail::fmt_g(deviation) +
                         " still above tolerance after " +
                         std::to_string(config.max_iterations) + " iterations",
                     deviation);
}

}  // namespace sortcf
