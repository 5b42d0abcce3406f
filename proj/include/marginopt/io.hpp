#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "marginopt/frontier.hpp"
#include "marginopt/market_data.hpp"
#include "marginopt/orthant.hpp"

namespace marginopt::io {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// stats.json: tickers, sample_count, r, S (row-major). Serialization is
/// canonical, so serialize(parse(text)) == text for files written here.
std::string stats_to_json(const data::AssetStats& stats);
data::AssetStats stats_from_json(const std::string& text);

/// frontier.csv: lambda,mu_re,mu_im,kind,s,rho,sharpe,accepted,weight_1..N
std::string frontier_csv(const frontier::FrontierSet& fs, std::size_t n_assets);

/// summary.json: max-Sharpe record, solution counts, eigenvalue census.
std::string summary_json(const frontier::FrontierSet& fs,
                         const solver::SolverConfig& cfg,
                         const data::AssetStats& stats);

/// multiplicity.csv: N,count,log_count,seed
std::string multiplicity_csv(const orthant::MultiplicityReport& report);

/// Scatter of all solution components: real contributions in blue,
/// imaginary contributions in red, per-asset points and the SP marker.
std::string figure_complex_svg(const frontier::FrontierSet& fs,
                               const data::AssetStats& stats);

/// Scatter of the purely real solutions with the SP marker.
std::string figure_real_svg(const frontier::FrontierSet& fs,
                            const data::AssetStats& stats);

/// Seeded synthetic daily-price history in the wide CSV layout: correlated
/// geometric random walks, full-precision decimals.
std::string synthetic_prices_csv(std::size_t assets, std::size_t days,
                                 std::uint64_t seed);

}  // namespace marginopt::io
