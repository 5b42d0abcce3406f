#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "marginopt/linalg.hpp"

namespace marginopt::data {

using linalg::RealMatrix;
using linalg::RealVector;

/// Wide CSV layout: first column holds ordered date labels, remaining columns
/// one ticker each, header row first.
struct CsvLayout {
  char delimiter = ',';
  std::string date_header = "date";
};

/// Validated price history: N tickers over P trading days, prices strictly
/// positive, dates strictly increasing, no gaps.
struct PriceTable {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;
  RealMatrix prices;  // N x P

  std::size_t asset_count() const { return tickers.size(); }
  std::size_t day_count() const { return dates.size(); }
};

/// Simple daily returns, N x M with M = P - 1.
struct ReturnTable {
  std::vector<std::string> tickers;
  RealMatrix returns;  // N x M

  std::size_t asset_count() const { return tickers.size(); }
  std::size_t sample_count() const { return returns.cols(); }
};

/// Mean-return vector and covariance matrix of the assets.
struct AssetStats {
  std::vector<std::string> tickers;
  RealVector r;   // mean daily returns
  RealMatrix S;   // covariance, symmetric by construction
  std::size_t sample_count = 0;

  std::size_t size() const { return tickers.size(); }
};

/// FNV-1a hash over tickers, sample count and the bit patterns of r and S;
/// identifies the statistics a downstream artifact was computed from.
std::uint64_t fingerprint(const AssetStats& stats);

PriceTable load_prices(std::istream& in, const CsvLayout& layout = {});
PriceTable load_prices_file(const std::filesystem::path& path,
                            const CsvLayout& layout = {});

/// returns[n][t] = (p[n][t+1] - p[n][t]) / p[n][t]
ReturnTable compute_returns(const PriceTable& table);

/// Population estimators over the M available returns:
/// r_n = mean of row n, s_ij = (1/M) sum (R_i - r_i)(R_j - r_j).
AssetStats estimate_stats(const ReturnTable& table);

}  // namespace marginopt::data
