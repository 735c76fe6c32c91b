// sortcf: inspect couple contingency tables, build counterfactual tables
// under two engines, and run availability/sorting decompositions.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sortcf/emit.hpp"
#include "sortcf/sortcf.hpp"

namespace {

using namespace sortcf;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitMethod = 4;

struct OutputOptions {
  std::string out_path;
  std::string format = "csv";
};

void add_output_options(CLI::App* cmd, OutputOptions* out) {
  cmd->add_option("--out", out->out_path,
                  "Write the result to this file instead of stdout");
  cmd->add_option("--format", out->format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void deliver(const OutputOptions& out, const std::string& csv,
             const ordered_json& json) {
  std::string body = out.format == "json" ? json.dump(2) + "\n" : csv;
  if (out.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::filesystem::path path(out.out_path);
  if (const char* dir = std::getenv("SORTCF_OUT_DIR"); dir && path.is_relative())
    path = std::filesystem::path(dir) / path;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f << body;
}

QMode parse_mode(const std::string& mode) {
  return mode == "continuous" ? QMode::Continuous : QMode::Floor;
}

Method parse_method(const std::string& method) {
  return method == "ipf" ? Method::IPF : Method::NM;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<SeriesKind> parse_kinds(const std::string& csv) {
  std::vector<SeriesKind> kinds;
  for (const std::string& token : split_list(csv)) {
    if (token == "all") return SeriesOptions{}.kinds;
    bool known = false;
    for (SeriesKind k :
         {SeriesKind::Observed, SeriesKind::DirectEndpoint,
          SeriesKind::WithIntermediates, SeriesKind::FixedBaseAvailability,
          SeriesKind::ConsecutiveChain})
      if (token == to_string(k)) {
        kinds.push_back(k);
        known = true;
      }
    if (!known)
      throw CLI::ValidationError("--kinds", "unknown series kind '" + token +
                                                "'");
  }
  return kinds;
}

// Tables in command-line order; order is the time order.
std::vector<ContingencyTable> load_tables(const std::vector<std::string>& paths) {
  std::vector<ContingencyTable> tables;
  for (const auto& p : paths) tables.push_back(load_table_csv(p).table);
  return tables;
}

int run(int argc, char** argv) {
  CLI::App app{"Couple-table sorting counterfactuals and decompositions"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "Check a table file");
  std::string validate_path;
  OutputOptions validate_out;
  validate->add_option("table", validate_path, "Table CSV")->required();
  add_output_options(validate, &validate_out);

  // ll
  auto* ll = app.add_subcommand("ll", "Sorting matrix of a table");
  std::string ll_path, ll_mode = "floor";
  OutputOptions ll_out;
  ll->add_option("table", ll_path, "Table CSV")->required();
  ll->add_option("--mode", ll_mode, "Q- policy")
      ->check(CLI::IsMember({"floor", "continuous"}))
      ->capture_default_str();
  add_output_options(ll, &ll_out);

  // nm / ipf
  struct FitArgs {
    std::string source, target, mode = "floor";
    double tolerance = IpfConfig{}.tolerance;
    int max_iter = IpfConfig{}.max_iterations;
    OutputOptions out;
  } nm_args, ipf_args;
  auto* nm = app.add_subcommand(
      "nm", "Counterfactual table keeping the source's sorting matrix");
  nm->add_option("source", nm_args.source, "Sorting source CSV")->required();
  nm->add_option("--target", nm_args.target,
                 "Table CSV supplying the target margins")
      ->required();
  nm->add_option("--mode", nm_args.mode, "Q- policy")
      ->check(CLI::IsMember({"floor", "continuous"}))
      ->capture_default_str();
  add_output_options(nm, &nm_args.out);

  auto* ipf = app.add_subcommand(
      "ipf", "Counterfactual table keeping the source's odds ratios");
  ipf->add_option("source", ipf_args.source, "Sorting source CSV")->required();
  ipf->add_option("--target", ipf_args.target,
                  "Table CSV supplying the target margins")
      ->required();
  ipf->add_option("--tolerance", ipf_args.tolerance, "Margin tolerance")
      ->capture_default_str();
  ipf->add_option("--max-iter", ipf_args.max_iter, "Iteration cap")
      ->capture_default_str();
  add_output_options(ipf, &ipf_args.out);

  // decompose
  auto* decompose = app.add_subcommand(
      "decompose", "Availability/sorting/interaction effects of a pair");
  std::vector<std::string> dec_paths;
  std::string dec_method = "nm", dec_mode = "floor";
  double dec_tol = IpfConfig{}.tolerance;
  int dec_iter = IpfConfig{}.max_iterations;
  OutputOptions dec_out;
  decompose->add_option("tables", dec_paths, "Base and end table CSVs")
      ->expected(2);
  decompose->add_option("--method", dec_method, "Counterfactual engine")
      ->check(CLI::IsMember({"nm", "ipf"}))
      ->capture_default_str();
  decompose->add_option("--mode", dec_mode, "Q- policy")
      ->check(CLI::IsMember({"floor", "continuous"}))
      ->capture_default_str();
  decompose->add_option("--tolerance", dec_tol, "IPF margin tolerance");
  decompose->add_option("--max-iter", dec_iter, "IPF iteration cap");
  add_output_options(decompose, &dec_out);

  // series
  auto* series = app.add_subcommand(
      "series", "Observed and counterfactual homogamy-share series");
  std::vector<std::string> ser_paths;
  std::string ser_method = "nm", ser_mode = "floor", ser_kinds = "all";
  std::string ser_base, ser_intermediates;
  bool ser_no_reversed = false;
  double ser_tol = IpfConfig{}.tolerance;
  int ser_iter = IpfConfig{}.max_iterations;
  OutputOptions ser_out;
  series->add_option("tables", ser_paths, "Table CSVs in time order")
      ->expected(-2);
  series->add_option("--method", ser_method, "Counterfactual engine")
      ->check(CLI::IsMember({"nm", "ipf"}))
      ->capture_default_str();
  series->add_option("--mode", ser_mode, "Q- policy")
      ->check(CLI::IsMember({"floor", "continuous"}))
      ->capture_default_str();
  series->add_option("--kinds", ser_kinds,
                     "Comma list: observed, direct_endpoint, "
                     "with_intermediates, fixed_base_availability, "
                     "consecutive_chain, or all")
      ->capture_default_str();
  series->add_option("--base", ser_base,
                     "Base period (earlier tables are dropped)");
  series->add_option("--intermediates", ser_intermediates,
                     "Comma list of periods for with_intermediates");
  series->add_flag("--no-reversed-chain", ser_no_reversed,
                   "Skip the reversed-ordering diagnostic chain");
  series->add_option("--tolerance", ser_tol, "IPF margin tolerance");
  series->add_option("--max-iter", ser_iter, "IPF iteration cap");
  add_output_options(series, &ser_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (validate->parsed()) {
    const TableFile tf = load_table_csv(validate_path);
    std::string csv = "field,value\n";
    csv += "path," + tf.path + "\n";
    csv += "rows," + std::to_string(tf.table.rows()) + "\n";
    csv += "cols," + std::to_string(tf.table.cols()) + "\n";
    if (!tf.period.empty()) csv += "period," + tf.period + "\n";
    if (!tf.bracket.empty()) csv += "bracket," + tf.bracket + "\n";
    csv += "grand_total," + format_g12(tf.table.grand_total()) + "\n";
    ordered_json j;
    j["path"] = tf.path;
    j["rows"] = tf.table.rows();
    j["cols"] = tf.table.cols();
    if (!tf.period.empty()) j["period"] = tf.period;
    if (!tf.bracket.empty()) j["bracket"] = tf.bracket;
    j["grand_total"] = tf.table.grand_total();
    if (tf.table.square()) {
      csv += "homogamy_share," + format_g12(homogamy_share(tf.table)) + "\n";
      j["homogamy_share"] = homogamy_share(tf.table);
    }
    deliver(validate_out, csv, j);
  } else if (ll->parsed()) {
    const TableFile tf = load_table_csv(ll_path);
    const SortingMatrix s = ll_generalized(tf.table, parse_mode(ll_mode));
    deliver(ll_out, emit_ll_csv(s), emit_ll_json(s));
  } else if (nm->parsed()) {
    const TableFile src = load_table_csv(nm_args.source);
    const TableFile tgt = load_table_csv(nm_args.target);
    const CounterfactualTable cf =
        nm_transform(src.table, margins(tgt.table), parse_mode(nm_args.mode),
                     tgt.period);
    deliver(nm_args.out, emit_counterfactual_csv(cf),
            emit_counterfactual_json(cf));
  } else if (ipf->parsed()) {
    const TableFile src = load_table_csv(ipf_args.source);
    const TableFile tgt = load_table_csv(ipf_args.target);
    const CounterfactualTable cf =
        ipf_fit(src.table, margins(tgt.table),
                IpfConfig{ipf_args.tolerance, ipf_args.max_iter}, tgt.period);
    deliver(ipf_args.out, emit_counterfactual_csv(cf),
            emit_counterfactual_json(cf));
  } else if (decompose->parsed()) {
    const auto tables = load_tables(dec_paths);
    MethodConfig cfg{parse_method(dec_method), parse_mode(dec_mode),
                     IpfConfig{dec_tol, dec_iter}};
    const DecompositionResult r = biewen_decompose(tables[0], tables[1], cfg);
    deliver(dec_out, emit_decomposition_csv(r), emit_decomposition_json(r));
  } else if (series->parsed()) {
    auto tables = load_tables(ser_paths);
    if (!ser_base.empty()) {
      std::size_t start = tables.size();
      for (std::size_t t = 0; t < tables.size(); ++t)
        if (tables[t].period() == ser_base) {
          start = t;
          break;
        }
      if (start == tables.size())
        throw DataError("base period '" + ser_base +
                        "' is not among the input tables");
      tables.erase(tables.begin(), tables.begin() + start);
    }
    SeriesOptions opt;
    opt.engine = MethodConfig{parse_method(ser_method), parse_mode(ser_mode),
                              IpfConfig{ser_tol, ser_iter}};
    opt.kinds = parse_kinds(ser_kinds);
    opt.intermediate_periods = split_list(ser_intermediates);
    opt.emit_reversed_chain = !ser_no_reversed;
    const SeriesResult r = run_series(tables, opt);
    deliver(ser_out, emit_series_csv(r), emit_series_json(r, opt.engine));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  } catch (const MethodError& e) {
    std::cerr << e.what() << "\n";
    return kExitMethod;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitMethod;
  }
}
