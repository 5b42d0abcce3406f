// marginopt: mean-variance portfolio selection under a constant weight-norm
// margin constraint, solved through a 2Nx2N eigenproblem per risk-aversion
// value, plus an orthant-enumeration baseline for the absolute-value margin
// variant.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <json.hpp>

#include "marginopt/errors.hpp"
#include "marginopt/frontier.hpp"
#include "marginopt/io.hpp"
#include "marginopt/market_data.hpp"
#include "marginopt/orthant.hpp"

namespace fs = std::filesystem;
using namespace marginopt;

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitRuntimeError = 1;

data::AssetStats stats_from_input(const std::string& input_path) {
  const std::string text = io::read_file(input_path);
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') {
    return io::stats_from_json(text);
  }
  std::istringstream in(text);
  return data::estimate_stats(data::compute_returns(data::load_prices(in)));
}

std::pair<std::size_t, std::size_t> parse_n_range(const std::string& text) {
  for (const char* sep : {"..", "-", ":"}) {
    const auto pos = text.find(sep);
    if (pos != std::string::npos) {
      const std::size_t lo = std::stoul(text.substr(0, pos));
      const std::size_t hi = std::stoul(text.substr(pos + std::strlen(sep)));
      return {lo, hi};
    }
  }
  const std::size_t single = std::stoul(text);
  return {single, single};
}

int cmd_estimate(const std::string& input, const std::string& output_dir) {
  const auto stats = stats_from_input(input);
  fs::create_directories(output_dir);
  const fs::path out = fs::path(output_dir) / "stats.json";
  const std::string text = io::stats_to_json(stats);
  io::write_file(out, text);
  // Validate: the artifact must reload to the same canonical bytes.
  if (io::stats_to_json(io::stats_from_json(io::read_file(out))) != text) {
    throw Error("stats.json failed the reload check");
  }
  std::cout << "wrote " << out.string() << " (N=" << stats.size()
            << ", samples=" << stats.sample_count << ")\n";
  return 0;
}

int cmd_frontier(const std::string& input, const std::string& output_dir,
                 const solver::SolverConfig& cfg, bool emit_svg) {
  const auto stats = stats_from_input(input);
  const auto set = frontier::sweep(stats, cfg);

  fs::create_directories(output_dir);
  const fs::path dir(output_dir);
  const std::string csv = io::frontier_csv(set, stats.size());
  io::write_file(dir / "frontier.csv", csv);
  io::write_file(dir / "summary.json", io::summary_json(set, cfg, stats));
  if (emit_svg) {
    io::write_file(dir / "frontier_complex.svg",
                   io::figure_complex_svg(set, stats));
    io::write_file(dir / "frontier_real.svg", io::figure_real_svg(set, stats));
  }

  // Validate row count against the record count.
  std::size_t rows = 0;
  for (char c : csv) rows += (c == '\n');
  if (rows != set.records.size() + 1) {
    throw Error("frontier.csv row count mismatch");
  }

  std::cout << "wrote " << (dir / "frontier.csv").string() << " ("
            << set.records.size() << " records, "
            << set.diagnostics.eigenvalues_examined()
            << " eigenvalues examined)\n";
  if (set.max_sharpe_index) {
    const auto& best = set.records[*set.max_sharpe_index];
    std::cout << "max Sharpe: xi=" << io::format_double(best.sharpe)
              << " at lambda=" << io::format_double(best.lambda)
              << " (s=" << io::format_double(best.risk)
              << ", rho=" << io::format_double(best.ret) << ")\n";
  }
  return 0;
}

int cmd_baseline(const std::string& output_dir, const std::string& n_range,
                 std::uint64_t seed, double lambda, double gamma, double wealth,
                 const std::string& instance) {
  const auto [n_lo, n_hi] = parse_n_range(n_range);
  const auto kind = instance == "isotropic" ? orthant::InstanceKind::kIsotropic
                                            : orthant::InstanceKind::kRandom;
  const auto report =
      orthant::multiplicity_scan(n_lo, n_hi, seed, lambda, gamma, wealth, kind);

  fs::create_directories(output_dir);
  const fs::path out = fs::path(output_dir) / "multiplicity.csv";
  io::write_file(out, io::multiplicity_csv(report));
  std::cout << "wrote " << out.string() << "\n";
  for (const auto& row : report.per_n) {
    std::cout << "N=" << row.n_assets << ": " << row.optima_count
              << " optima (" << row.objective_count
              << " distinct objectives)\n";
  }
  return 0;
}

int cmd_report(const std::string& input) {
  fs::path path(input);
  if (fs::is_directory(path)) path /= "summary.json";
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("summary.json: " + std::string(e.what()));
  }
  std::cout << "assets: " << doc.at("assets").get<std::size_t>() << "\n";
  std::cout << "lambda steps: " << doc.at("lambda_steps").get<std::size_t>()
            << "\n";
  const auto& census = doc.at("eigenvalues_examined");
  std::cout << "eigenvalues examined: "
            << census.at("total").get<std::size_t>() << " (interior "
            << census.at("interior").get<std::size_t>() << ", endpoints "
            << census.at("endpoints").get<std::size_t>() << ")\n";
  const auto& counts = doc.at("counts");
  std::cout << "records: " << counts.at("records").get<std::size_t>()
            << ", accepted real: "
            << counts.at("accepted_real").get<std::size_t>()
            << ", accepted complex: "
            << counts.at("accepted_complex").get<std::size_t>()
            << ", spurious: " << counts.at("spurious").get<std::size_t>()
            << "\n";
  if (!doc.at("max_sharpe").is_null()) {
    const auto& sp = doc.at("max_sharpe");
    std::cout << "max Sharpe: xi=" << sp.at("sharpe").get<double>()
              << " at lambda=" << sp.at("lambda").get<double>() << " (s="
              << sp.at("risk").get<double>() << ", rho="
              << sp.at("return").get<double>() << ")\n";
    std::cout << "weights:";
    for (double w : sp.at("weights").get<std::vector<double>>()) {
      std::cout << ' ' << w;
    }
    std::cout << "\n";
  } else {
    std::cout << "max Sharpe: none (no record with positive risk)\n";
  }
  return 0;
}

int cmd_synth(const std::string& out_path, std::size_t assets,
              std::size_t days, std::uint64_t seed) {
  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  io::write_file(out, io::synthetic_prices_csv(assets, days, seed));
  std::cout << "wrote " << out.string() << " (" << assets << " assets, "
            << days << " days)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"norm-constrained mean-variance portfolio solver"};
  app.require_subcommand(1);

  std::string input;
  std::string output_dir = "out";
  std::string n_range = "2..10";
  std::string instance = "random";
  std::string synth_out = "prices.csv";
  std::size_t assets = 12;
  std::size_t days = 301;
  std::uint64_t seed = 1;
  double lambda = 0.5;
  bool emit_svg = false;
  solver::SolverConfig cfg;

  auto* est = app.add_subcommand("estimate",
                                 "estimate return/covariance statistics from a "
                                 "price CSV and write stats.json");
  est->add_option("--input", input, "price CSV")->required();
  est->add_option("--output-dir", output_dir, "output directory");

  auto* fro = app.add_subcommand("frontier",
                                 "sweep the risk-aversion grid and write "
                                 "frontier.csv / summary.json");
  fro->add_option("--input", input, "price CSV or stats.json")->required();
  fro->add_option("--output-dir", output_dir, "output directory");
  fro->add_option("--lambda-steps", cfg.lambda_steps, "grid steps T");
  fro->add_option("--gamma", cfg.gamma, "margin fraction");
  fro->add_option("--wealth", cfg.wealth, "invested wealth");
  fro->add_option("--tol", cfg.residual_tol, "residual tolerance");
  fro->add_flag("--svg", emit_svg, "emit scatter figures");
  fro->add_flag("--sharpe-complex-parts", cfg.sharpe_include_complex_parts,
                "let real/imaginary components of complex solutions compete "
                "in the Sharpe ranking");

  auto* base = app.add_subcommand("baseline",
                                  "enumerate orthant optima of the "
                                  "absolute-value margin constraint");
  base->add_option("--output-dir", output_dir, "output directory");
  base->add_option("--n-range", n_range, "asset-count range, e.g. 2..10");
  base->add_option("--seed", seed, "instance seed");
  base->add_option("--lambda", lambda, "risk-aversion value in (0,1]");
  base->add_option("--gamma", cfg.gamma, "margin fraction");
  base->add_option("--wealth", cfg.wealth, "invested wealth");
  base->add_option("--instance", instance, "instance kind: random | isotropic")
      ->check(CLI::IsMember({"random", "isotropic"}));

  auto* rep = app.add_subcommand("report", "print a saved summary.json");
  rep->add_option("--input", input, "summary.json or its directory")
      ->required();

  auto* syn = app.add_subcommand("synth",
                                 "generate a synthetic daily-price CSV");
  syn->add_option("--out", synth_out, "output CSV path");
  syn->add_option("--assets", assets, "number of assets");
  syn->add_option("--days", days, "number of trading days");
  syn->add_option("--seed", seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return cmd_estimate(input, output_dir);
    if (fro->parsed()) return cmd_frontier(input, output_dir, cfg, emit_svg);
    if (base->parsed()) {
      return cmd_baseline(output_dir, n_range, seed, lambda, cfg.gamma,
                          cfg.wealth, instance);
    }
    if (rep->parsed()) return cmd_report(input);
    if (syn->parsed()) return cmd_synth(synth_out, assets, days, seed);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SizeCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DegenerateObjectiveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return 0;
}
