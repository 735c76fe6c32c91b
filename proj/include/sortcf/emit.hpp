#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sortcf/csv.hpp"
#include "sortcf/decompose.hpp"
#include "sortcf/ll.hpp"
#include "sortcf/nm.hpp"
#include "sortcf/table.hpp"

// CSV and JSON emitters for the library's result types. Both carry the same
// numeric values; CSV renders them at 12 significant digits.

namespace sortcf {

using ordered_json = nlohmann::ordered_json;

inline std::string emit_ll_csv(const SortingMatrix& s) {
  std::string out = "i,j,ll\n";
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      out += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
             format_g12(s.at(i, j)) + "\n";
  return out;
}

inline ordered_json emit_ll_json(const SortingMatrix& s) {
  ordered_json j;
  j["source_rows"] = s.source_rows;
  j["source_cols"] = s.source_cols;
  j["mode"] = to_string(s.mode);
  ordered_json values = ordered_json::array();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < s.cols(); ++c) row.push_back(s.at(i, c));
    values.push_back(row);
  }
  j["values"] = values;
  return j;
}

inline std::string emit_counterfactual_csv(const CounterfactualTable& c) {
  std::string out = "# method: " + c.method_tag + "\n";
  if (!c.sorting_source_tag.empty())
    out += "# sorting-period: " + c.sorting_source_tag + "\n";
  out += write_table_csv(c.table);
  return out;
}

inline ordered_json table_json(const ContingencyTable& z) {
  ordered_json j;
  if (!z.period().empty()) j["period"] = z.period();
  j["row_labels"] = z.row_labels();
  j["col_labels"] = z.col_labels();
  ordered_json cells = ordered_json::array();
  for (std::size_t i = 0; i < z.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < z.cols(); ++c) row.push_back(z.at(i, c));
    cells.push_back(row);
  }
  j["cells"] = cells;
  return j;
}

inline ordered_json emit_counterfactual_json(const CounterfactualTable& c) {
  ordered_json j;
  j["method"] = c.method_tag;
  if (!c.sorting_source_tag.empty())
    j["sorting_period"] = c.sorting_source_tag;
  if (!c.availability_source_tag.empty())
    j["availability_period"] = c.availability_source_tag;
  j["table"] = table_json(c.table);
  return j;
}

inline std::string emit_decomposition_csv(const DecompositionResult& r) {
  std::string out =
      "base_period,end_period,method,total_change_pp,availability_effect_pp,"
      "sorting_effect_pp,interaction_effect_pp,total_change_frac,"
      "availability_effect_frac,sorting_effect_frac,interaction_effect_frac\n";
  out += r.base_period + "," + r.end_period + "," + r.method_tag;
  for (double v : {r.total_change, r.availability_effect, r.sorting_effect,
                   r.interaction_effect})
    out += "," + format_g12(v);
  for (double v : {r.total_change, r.availability_effect, r.sorting_effect,
                   r.interaction_effect})
    out += "," + format_g12(v / 100.0);
  out += "\n";
  return out;
}

inline ordered_json emit_decomposition_json(const DecompositionResult& r) {
  ordered_json j;
  j["base_period"] = r.base_period;
  j["end_period"] = r.end_period;
  j["method"] = r.method_tag;
  j["total_change_pp"] = r.total_change;
  j["availability_effect_pp"] = r.availability_effect;
  j["sorting_effect_pp"] = r.sorting_effect;
  j["interaction_effect_pp"] = r.interaction_effect;
  j["total_change_frac"] = r.total_change / 100.0;
  j["availability_effect_frac"] = r.availability_effect / 100.0;
  j["sorting_effect_frac"] = r.sorting_effect / 100.0;
  j["interaction_effect_frac"] = r.interaction_effect / 100.0;
  return j;
}

namespace detail {

inline double point_value(const SeriesPoint& p) {
  return p.observed_share ? *p.observed_share : *p.counterfactual_share;
}

}  // namespace detail

inline std::string emit_series_csv(const SeriesResult& s) {
  std::string out = "kind,period,share_frac,share_pct\n";
  const auto row = [&](const std::string& kind, const SeriesPoint& p) {
    const double v = detail::point_value(p);
    out += kind + "," + p.period + "," + format_g12(v) + "," +
           format_g12(100.0 * v) + "\n";
  };
  for (const SeriesPoint& p : s.points) row(to_string(p.kind), p);
  for (const SeriesPoint& p : s.reversed_chain)
    row("consecutive_chain_reversed", p);
  return out;
}

inline ordered_json emit_series_json(const SeriesResult& s,
                                     const MethodConfig& cfg) {
  ordered_json j;
  j["method"] = to_string(cfg.method);
  j["mode"] = to_string(cfg.mode);
  ordered_json points = ordered_json::array();
  const auto point_json = [](const std::string& kind, const SeriesPoint& p) {
    ordered_json q;
    q["kind"] = kind;
    q["period"] = p.period;
    if (p.observed_share) q["observed_share"] = *p.observed_share;
    if (p.counterfactual_share)
      q["counterfactual_share"] = *p.counterfactual_share;
    q["share_pct"] = 100.0 * detail::point_value(p);
    return q;
  };
  for (const SeriesPoint& p : s.points)
    points.push_back(point_json(to_string(p.kind), p));
  for (const SeriesPoint& p : s.reversed_chain)
    points.push_back(point_json("consecutive_chain_reversed", p));
  j["points"] = points;
  ordered_json pairs = ordered_json::array();
  for (const DecompositionResult& r : s.pair_decompositions)
    pairs.push_back(emit_decomposition_json(r));
  j["pair_decompositions"] = pairs;
  return j;
}

}  // namespace sortcf
