#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sortcf/error.hpp"
#include "sortcf/ipf.hpp"
#include "sortcf/nm.hpp"
#include "sortcf/table.hpp"

namespace sortcf {

enum class Method { NM, IPF };

inline const char* to_string(Method m) { return m == Method::NM ? "nm" : "ipf"; }

struct MethodConfig {
  Method method = Method::NM;
  QMode mode = QMode::Floor;
  IpfConfig ipf{};
};

// g(A, P): the counterfactual table with P's sorting and A's margins.
inline CounterfactualTable make_counterfactual(const Margins& availability,
                                               const ContingencyTable& sorting,
                                               const MethodConfig& cfg,
                                               std::string availability_tag = "") {
  if (cfg.method == Method::NM)
    return nm_transform(sorting, availability, cfg.mode,
                        std::move(availability_tag));
  return ipf_fit(sorting, availability, cfg.ipf, std::move(availability_tag));
}

// f = h o g. When the availability equals the sorting table's own margins the
// counterfactual is the table itself and this is just the observed share.
inline double counterfactual_share(const Margins& availability,
                                   const ContingencyTable& sorting,
                                   const MethodConfig& cfg = {}) {
  if (!sorting.square())
    throw DataError("counterfactual share needs a square sorting table");
  if (margins_equal_exact(availability, margins(sorting)))
    return homogamy_share(sorting);
  return homogamy_share(make_counterfactual(availability, sorting, cfg).table);
}

// Additive two-factor decomposition with an interaction term. All effects are
// in percentage points of the homogamy share.
struct DecompositionResult {
  double total_change = 0.0;
  double availability_effect = 0.0;
  double sorting_effect = 0.0;
  double interaction_effect = 0.0;
  std::string base_period;
  std::string end_period;
  std::string method_tag;
};

namespace detail {

inline std::string period_or(const ContingencyTable& z, std::size_t index) {
  return z.period().empty() ? "t" + std::to_string(index) : z.period();
}

// Re-raise engine failures with the period pair attached, keeping the
// original message verbatim.
template <typename Fn>
double with_pair_context(const std::string& base, const std::string& end,
                         Fn&& fn) {
  try {
    return fn();
  } catch (const MethodError& e) {
    throw MethodError(std::string(e.what()) + " [comparing " + base + " -> " +
                      end + "]");
  }
}

inline void check_pair(const ContingencyTable& t0, const ContingencyTable& t1) {
  if (!t0.square() || !t1.square())
    throw DataError("decomposition needs square tables");
  if (t0.rows() != t1.rows() || t0.cols() != t1.cols())
    throw DataError("decomposition needs tables of equal dimensions");
  if (t0.row_labels() != t1.row_labels() || t0.col_labels() != t1.col_labels())
    throw DataError("decomposition needs tables with identical labels");
}

}  // namespace detail

inline DecompositionResult biewen_decompose(const ContingencyTable& t0,
                                            const ContingencyTable& t1,
                                            const MethodConfig& cfg = {}) {
  detail::check_pair(t0, t1);
  const std::string base = detail::period_or(t0, 0);
  const std::string end = detail::period_or(t1, 1);
  const Margins a0 = margins(t0);
  const Margins a1 = margins(t1);

  const double f00 = 100.0 * homogamy_share(t0);
  const double f11 = 100.0 * homogamy_share(t1);
  const double f10 = detail::with_pair_context(
      base, end, [&] { return 100.0 * counterfactual_share(a1, t0, cfg); });
  const double f01 = detail::with_pair_context(
      base, end, [&] { return 100.0 * counterfactual_share(a0, t1, cfg); });

  DecompositionResult r;
  r.availability_effect = f10 - f00;
  r.sorting_effect = f01 - f00;
  r.interaction_effect = f11 - f10 - f01 + f00;
  r.total_change = f11 - f00;
  r.base_period = base;
  r.end_period = end;
  r.method_tag = to_string(cfg.method);
  return r;
}

enum class SeriesKind {
  Observed,
  DirectEndpoint,
  WithIntermediates,
  FixedBaseAvailability,
  ConsecutiveChain,
};

inline const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::Observed: return "observed";
    case SeriesKind::DirectEndpoint: return "direct_endpoint";
    case SeriesKind::WithIntermediates: return "with_intermediates";
    case SeriesKind::FixedBaseAvailability: return "fixed_base_availability";
    case SeriesKind::ConsecutiveChain: return "consecutive_chain";
  }
  return "?";
}

struct SeriesPoint {
  SeriesKind kind = SeriesKind::Observed;
  std::string period;
  std::optional<double> observed_share;        // fraction in [0,1]
  std::optional<double> counterfactual_share;  // fraction
};

struct SeriesOptions {
  MethodConfig engine{};
  std::vector<SeriesKind> kinds = {
      SeriesKind::Observed, SeriesKind::DirectEndpoint,
      SeriesKind::WithIntermediates, SeriesKind::FixedBaseAvailability,
      SeriesKind::ConsecutiveChain};
  // Periods used by WithIntermediates; empty means every period. The base and
  // final periods always take part.
  std::vector<std::string> intermediate_periods;
  // Emit the end-anchored chain next to the base-anchored one.
  bool emit_reversed_chain = true;
};

struct SeriesResult {
  std::vector<SeriesPoint> points;
  // Full per-pair decompositions of consecutive periods, in time order.
  std::vector<DecompositionResult> pair_decompositions;
  // Diagnostic chain built from end-anchored sorting terms.
  std::vector<SeriesPoint> reversed_chain;
};

namespace detail {

// Cumulative sorting path over the given period indices: anchored at the
// base observed share, adding each pair's sorting effect f(A_s, P_t) - h(Z_s).
inline std::vector<double> chain_shares(
    const std::vector<ContingencyTable>& tables,
    const std::vector<std::size_t>& idx, const MethodConfig& cfg) {
  std::vector<double> shares;
  shares.push_back(homogamy_share(tables[idx[0]]));
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const ContingencyTable& prev = tables[idx[k - 1]];
    const ContingencyTable& cur = tables[idx[k]];
    const double delta_p = with_pair_context(
        period_or(prev, idx[k - 1]), period_or(cur, idx[k]), [&] {
          return counterfactual_share(margins(prev), cur, cfg) -
                 homogamy_share(prev);
        });
    shares.push_back(shares.back() + delta_p);
  }
  return shares;
}

}  // namespace detail

inline SeriesResult run_series(const std::vector<ContingencyTable>& tables,
                               const SeriesOptions& opt = {}) {
  if (tables.size() < 2) throw DataError("a series needs at least two tables");
  for (std::size_t t = 1; t < tables.size(); ++t)
    detail::check_pair(tables[0], tables[t]);

  std::vector<std::string> periods(tables.size());
  for (std::size_t t = 0; t < tables.size(); ++t) {
    periods[t] = detail::period_or(tables[t], t);
    for (std::size_t s = 0; s < t; ++s)
      if (periods[s] == periods[t])
        throw DataError("duplicate period tag '" + periods[t] + "'");
  }

  const MethodConfig& cfg = opt.engine;
  const std::size_t last = tables.size() - 1;
  const Margins base_margins = margins(tables[0]);
  const auto wants = [&](SeriesKind k) {
    return std::find(opt.kinds.begin(), opt.kinds.end(), k) != opt.kinds.end();
  };

  SeriesResult result;
  const auto push = [&](SeriesKind kind, std::size_t t,
                        std::optional<double> observed,
                        std::optional<double> counterfactual) {
    result.points.push_back(SeriesPoint{kind, periods[t], observed, counterfactual});
  };

  if (wants(SeriesKind::Observed))
    for (std::size_t t = 0; t <= last; ++t)
      push(SeriesKind::Observed, t, homogamy_share(tables[t]), std::nullopt);

  if (wants(SeriesKind::DirectEndpoint)) {
    push(SeriesKind::DirectEndpoint, 0, std::nullopt,
         homogamy_share(tables[0]));
    const double f = detail::with_pair_context(periods[0], periods[last], [&] {
      return counterfactual_share(base_margins, tables[last], cfg);
    });
    push(SeriesKind::DirectEndpoint, last, std::nullopt, f);
  }

  if (wants(SeriesKind::WithIntermediates)) {
    std::vector<std::size_t> idx;
    if (opt.intermediate_periods.empty()) {
      for (std::size_t t = 0; t <= last; ++t) idx.push_back(t);
    } else {
      std::set<std::string> selected(opt.intermediate_periods.begin(),
                                     opt.intermediate_periods.end());
      for (const auto& p : selected)
        if (std::find(periods.begin(), periods.end(), p) == periods.end())
          throw DataError("intermediate period '" + p +
                          "' is not among the input tables");
      for (std::size_t t = 0; t <= last; ++t)
        if (t == 0 || t == last || selected.count(periods[t]))
          idx.push_back(t);
    }
    const std::vector<double> shares = detail::chain_shares(tables, idx, cfg);
    for (std::size_t k = 0; k < idx.size(); ++k)
      push(SeriesKind::WithIntermediates, idx[k], std::nullopt, shares[k]);
  }

  if (wants(SeriesKind::FixedBaseAvailability))
    for (std::size_t t = 0; t <= last; ++t) {
      const double f = detail::with_pair_context(periods[0], periods[t], [&] {
        return counterfactual_share(base_margins, tables[t], cfg);
      });
      push(SeriesKind::FixedBaseAvailability, t, std::nullopt, f);
    }

  if (wants(SeriesKind::ConsecutiveChain)) {
    std::vector<std::size_t> idx(tables.size());
    for (std::size_t t = 0; t <= last; ++t) idx[t] = t;
    const std::vector<double> shares = detail::chain_shares(tables, idx, cfg);
    for (std::size_t t = 0; t <= last; ++t)
      push(SeriesKind::ConsecutiveChain, t, std::nullopt, shares[t]);

    for (std::size_t t = 1; t <= last; ++t)
      result.pair_decompositions.push_back(
          biewen_decompose(tables[t - 1], tables[t], cfg));

    if (opt.emit_reversed_chain) {
      double share = homogamy_share(tables[0]);
      result.reversed_chain.push_back(
          SeriesPoint{SeriesKind::ConsecutiveChain, periods[0], std::nullopt,
                      share});
      for (std::size_t t = 1; t <= last; ++t) {
        const double delta_p =
            detail::with_pair_context(periods[t - 1], periods[t], [&] {
              return homogamy_share(tables[t]) -
                     counterfactual_share(margins(tables[t]), tables[t - 1],
                                          cfg);
            });
        share += delta_p;
        result.reversed_chain.push_back(SeriesPoint{
            SeriesKind::ConsecutiveChain, periods[t], std::nullopt, share});
      }
    }
  }

  return result;
}

}  // namespace sortcf
