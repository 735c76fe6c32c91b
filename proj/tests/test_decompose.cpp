#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sortcf/decompose.hpp"
#include "sortcf/table.hpp"
#include "testutil.hpp"

using namespace sortcf;
using testutil::make_table;

namespace {

// Frozen by randomized search: three periods in which availability and
// sorting co-move strongly enough that the direct endpoint comparison and
// the consecutive chain land visibly apart under both engines.
const std::vector<std::vector<double>> kSensitivity = {
    {39, 2, 1, 8, 2, 40, 5, 1, 4, 4, 34, 4, 8, 1, 1, 19},
    {25, 8, 3, 2, 8, 44, 9, 4, 5, 7, 47, 9, 3, 3, 4, 39},
    {48, 2, 6, 3, 2, 37, 4, 4, 3, 1, 28, 8, 7, 8, 9, 18},
};

std::vector<ContingencyTable> sensitivity_tables() {
  std::vector<ContingencyTable> out;
  for (std::size_t t = 0; t < kSensitivity.size(); ++t)
    out.push_back(make_table(4, 4, kSensitivity[t], "t" + std::to_string(t)));
  return out;
}

double series_value(const SeriesResult& r, SeriesKind kind,
                    const std::string& period) {
  for (const auto& p : r.points)
    if (p.kind == kind && p.period == period)
      return p.observed_share ? *p.observed_share : *p.counterfactual_share;
  FAIL("missing series point");
  return 0.0;
}

}  // namespace

TEST_CASE("counterfactual_share on the sorting table's own margins") {
  std::mt19937 rng(89);
  const auto z = testutil::random_sorted_table(rng, 4);
  for (Method method : {Method::NM, Method::IPF}) {
    MethodConfig cfg;
    cfg.method = method;
    REQUIRE(counterfactual_share(margins(z), z, cfg) == homogamy_share(z));
  }
}

TEST_CASE("counterfactual_share worked examples witness nm != ipf") {
  const auto p = make_table(2, 2, {30, 10, 10, 50});
  const Margins a({50, 50}, {50, 50});
  MethodConfig nm_cfg;
  MethodConfig ipf_cfg;
  ipf_cfg.method = Method::IPF;
  const double nm_share = counterfactual_share(a, p, nm_cfg);
  const double ipf_share = counterfactual_share(a, p, ipf_cfg);
  REQUIRE(nm_share == Catch::Approx(2 * 475.0 / 12.0 / 100.0).epsilon(1e-9));
  // 2a/100 with a = 50*sqrt(15)/(1+sqrt(15))
  REQUIRE(ipf_share == Catch::Approx(0.7947869038423274).margin(1e-6));
  REQUIRE(std::abs(nm_share - ipf_share) > 1e-3);
}

TEST_CASE("biewen terms vanish when nothing changes") {
  const auto z = make_table(2, 2, {30, 10, 10, 50}, "1960");
  const auto r = biewen_decompose(z, z.with_period("2015"));
  REQUIRE(r.total_change == 0.0);
  REQUIRE(r.availability_effect == 0.0);
  REQUIRE(r.sorting_effect == 0.0);
  REQUIRE(r.interaction_effect == 0.0);
  REQUIRE(r.base_period == "1960");
  REQUIRE(r.end_period == "2015");
}

TEST_CASE("pairs that differ only in availability have no sorting effect") {
  std::mt19937 rng(97);
  MethodConfig cfg;
  cfg.mode = QMode::Continuous;
  int done = 0;
  while (done < 10) {
    const auto t0 = testutil::random_sorted_table(rng, 4, "t0");
    const auto target = margins(testutil::random_sorted_table(rng, 4));
    try {
      const auto t1 =
          nm_transform(t0, target, QMode::Continuous).table.with_period("t1");
      const auto r = biewen_decompose(t0, t1, cfg);
      REQUIRE(r.sorting_effect == Catch::Approx(0.0).margin(1e-9));
      REQUIRE(r.interaction_effect == Catch::Approx(0.0).margin(1e-9));
      REQUIRE(r.availability_effect ==
              Catch::Approx(r.total_change).margin(1e-9));
      ++done;
    } catch (const MethodError&) {
    }
  }
}

TEST_CASE("pairs that differ only in sorting have no availability effect") {
  std::mt19937 rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const auto t0 = testutil::random_sorted_table(rng, 4, "t0");
    // move one unit of mass between the diagonal and the off-diagonal of the
    // leading 2x2 block; margins are untouched
    std::vector<double> cells = t0.cells();
    cells[0 * 4 + 0] += 1.0;
    cells[1 * 4 + 1] += 1.0;
    cells[0 * 4 + 1] -= 1.0;
    cells[1 * 4 + 0] -= 1.0;
    const auto t1 = make_table(4, 4, cells, "t1");
    const auto r = biewen_decompose(t0, t1);
    REQUIRE(r.availability_effect == 0.0);
    REQUIRE(r.interaction_effect == 0.0);
    REQUIRE(r.sorting_effect == r.total_change);
  }
}

TEST_CASE("biewen term sum is an arithmetic identity") {
  std::mt19937 rng(103);
  MethodConfig cfg;
  cfg.mode = QMode::Continuous;
  int done = 0;
  while (done < 50) {
    const auto t0 = testutil::random_sorted_table(rng, 3, "a");
    const auto t1 = testutil::random_sorted_table(rng, 3, "b");
    try {
      const auto r = biewen_decompose(t0, t1, cfg);
      REQUIRE(r.availability_effect + r.sorting_effect + r.interaction_effect ==
              Catch::Approx(r.total_change).margin(1e-12));
      ++done;
    } catch (const MethodError&) {
    }
  }
}

TEST_CASE("biewen rejects mismatched tables") {
  const auto a = make_table(2, 2, {1, 2, 3, 4});
  const auto b = make_table(3, 3, std::vector<double>(9, 1.0));
  REQUIRE_THROWS_AS(biewen_decompose(a, b), DataError);
  const auto c = make_table(2, 3, {1, 2, 3, 4, 5, 6});
  REQUIRE_THROWS_AS(biewen_decompose(c, c), DataError);
}

TEST_CASE("engine failures carry the period pair") {
  const auto t0 = make_table(2, 2, {30, 10, 10, 50}, "1960");
  const auto t1 = make_table(2, 2, {10, 40, 40, 10}, "2015");
  try {
    biewen_decompose(t0, t1);
    FAIL("expected MethodError");
  } catch (const MethodError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("NegativeSortingSource") != std::string::npos);
    REQUIRE(msg.find("1960 -> 2015") != std::string::npos);
  }
}

TEST_CASE("chain telescopes across the whole series") {
  const auto tables = sensitivity_tables();
  for (Method method : {Method::NM, Method::IPF}) {
    MethodConfig cfg;
    cfg.method = method;
    double accumulated = 0.0;
    for (std::size_t t = 1; t < tables.size(); ++t) {
      const auto r = biewen_decompose(tables[t - 1], tables[t], cfg);
      accumulated +=
          r.availability_effect + r.sorting_effect + r.interaction_effect;
    }
    const double want =
        100.0 * (homogamy_share(tables.back()) - homogamy_share(tables[0]));
    REQUIRE(accumulated == Catch::Approx(want).margin(1e-9));
  }
}

TEST_CASE("two-period chain coincides with the direct endpoint") {
  const auto all = sensitivity_tables();
  const std::vector<ContingencyTable> two = {all[0], all[1]};
  const auto r = run_series(two, SeriesOptions{});
  REQUIRE(series_value(r, SeriesKind::ConsecutiveChain, "t1") ==
          Catch::Approx(series_value(r, SeriesKind::DirectEndpoint, "t1"))
              .margin(1e-12));
}

TEST_CASE("identical tables give constant series of every kind") {
  const auto z = make_table(3, 3, {20, 3, 1, 3, 25, 4, 1, 4, 30});
  const std::vector<ContingencyTable> tables = {
      z.with_period("a"), z.with_period("b"), z.with_period("c")};
  const auto r = run_series(tables, SeriesOptions{});
  const double h = homogamy_share(z);
  for (const auto& p : r.points) {
    const double v = p.observed_share ? *p.observed_share
                                      : *p.counterfactual_share;
    REQUIRE(v == Catch::Approx(h).margin(1e-12));
  }
}

TEST_CASE("direct endpoint and consecutive chain disagree on the fixture") {
  const auto tables = sensitivity_tables();
  for (Method method : {Method::NM, Method::IPF}) {
    SeriesOptions opt;
    opt.engine.method = method;
    const auto r = run_series(tables, opt);
    const double direct = series_value(r, SeriesKind::DirectEndpoint, "t2");
    const double chain = series_value(r, SeriesKind::ConsecutiveChain, "t2");
    INFO("method " << to_string(method));
    REQUIRE(std::abs(direct - chain) > 1e-3);
    // the chain anchors at the base observed share
    REQUIRE(series_value(r, SeriesKind::ConsecutiveChain, "t0") ==
            Catch::Approx(homogamy_share(tables[0])).margin(1e-12));
    // per-pair decompositions and the reversed chain come along
    REQUIRE(r.pair_decompositions.size() == 2);
    REQUIRE(r.reversed_chain.size() == 3);
  }
}

TEST_CASE("with-intermediates over the endpoints only is the direct path") {
  const auto tables = sensitivity_tables();
  SeriesOptions opt;
  opt.intermediate_periods = {"t0", "t2"};
  const auto r = run_series(tables, opt);
  REQUIRE(series_value(r, SeriesKind::WithIntermediates, "t2") ==
          Catch::Approx(series_value(r, SeriesKind::DirectEndpoint, "t2"))
              .margin(1e-12));
  // and with every period selected it is the full chain
  SeriesOptions all;
  const auto r2 = run_series(tables, all);
  REQUIRE(series_value(r2, SeriesKind::WithIntermediates, "t2") ==
          Catch::Approx(series_value(r2, SeriesKind::ConsecutiveChain, "t2"))
              .margin(1e-12));
}

TEST_CASE("fixed-base availability series starts at the observed share") {
  const auto tables = sensitivity_tables();
  const auto r = run_series(tables, SeriesOptions{});
  REQUIRE(series_value(r, SeriesKind::FixedBaseAvailability, "t0") ==
          Catch::Approx(homogamy_share(tables[0])).margin(1e-12));
}

TEST_CASE("reversed chain uses end-anchored sorting terms") {
  const auto all = sensitivity_tables();
  const std::vector<ContingencyTable> two = {all[0], all[1]};
  const auto r = run_series(two, SeriesOptions{});
  REQUIRE(r.reversed_chain.size() == 2);
  MethodConfig cfg;
  const double want = homogamy_share(two[0]) + homogamy_share(two[1]) -
                      counterfactual_share(margins(two[1]), two[0], cfg);
  REQUIRE(*r.reversed_chain[1].counterfactual_share ==
          Catch::Approx(want).margin(1e-12));
}

TEST_CASE("run_series input validation") {
  const auto tables = sensitivity_tables();
  REQUIRE_THROWS_AS(run_series({tables[0]}, SeriesOptions{}), DataError);
  REQUIRE_THROWS_AS(
      run_series({tables[0], tables[1].with_period("t0")}, SeriesOptions{}),
      DataError);
  SeriesOptions opt;
  opt.intermediate_periods = {"nope"};
  REQUIRE_THROWS_AS(run_series(tables, opt), DataError);
}
