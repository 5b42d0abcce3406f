#include "marginopt/market_data.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "marginopt/errors.hpp"

namespace marginopt::data {

namespace {

void fnv_mix(std::uint64_t& hash, const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= p[i];
    hash *= 0x100000001B3ull;
  }
}

void fnv_mix_double(std::uint64_t& hash, double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  fnv_mix(hash, &bits, sizeof bits);
}

}  // namespace

std::uint64_t fingerprint(const AssetStats& stats) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  const std::uint64_t n = stats.size();
  fnv_mix(hash, &n, sizeof n);
  for (const auto& t : stats.tickers) fnv_mix(hash, t.data(), t.size());
  const std::uint64_t m = stats.sample_count;
  fnv_mix(hash, &m, sizeof m);
  for (double x : stats.r) fnv_mix_double(hash, x);
  for (double x : stats.S.entries()) fnv_mix_double(hash, x);
  return hash;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_price(const std::string& cell, long row, long col) {
  if (cell.empty()) {
    throw ValidationError("empty price cell at row " + std::to_string(row) +
                              ", column " + std::to_string(col),
                          row, col);
  }
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("unparseable price '" + cell + "' at row " +
                              std::to_string(row) + ", column " +
                              std::to_string(col),
                          row, col);
  }
  return value;
}

}  // namespace

PriceTable load_prices(std::istream& in, const CsvLayout& layout) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("empty input: missing header row", 1, 1);
  }
  const auto header = split_line(strip_cr(line), layout.delimiter);
  if (header.empty() || header[0] != layout.date_header) {
    throw ValidationError("header must start with '" + layout.date_header +
                              "'",
                          1, 1);
  }
  if (header.size() < 2) {
    throw ValidationError("header names no tickers", 1, 2);
  }
  const std::size_t n_assets = header.size() - 1;

  std::vector<std::string> dates;
  std::vector<std::vector<double>> rows;  // one vector per date row
  long row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    const std::string trimmed = strip_cr(line);
    if (trimmed.empty()) continue;
    const auto cells = split_line(trimmed, layout.delimiter);
    if (cells.size() != header.size()) {
      throw ValidationError("row " + std::to_string(row_no) + " has " +
                                std::to_string(cells.size()) +
                                " cells, expected " +
                                std::to_string(header.size()),
                            row_no, static_cast<long>(cells.size()));
    }
    if (cells[0].empty()) {
      throw ValidationError("missing date at row " + std::to_string(row_no),
                            row_no, 1);
    }
    if (!dates.empty() && !(dates.back() < cells[0])) {
      throw ValidationError("dates not strictly increasing at row " +
                                std::to_string(row_no) + " ('" + cells[0] +
                                "' after '" + dates.back() + "')",
                            row_no, 1);
    }
    std::vector<double> prices(n_assets);
    for (std::size_t j = 0; j < n_assets; ++j) {
      const double p =
          parse_price(cells[j + 1], row_no, static_cast<long>(j + 2));
      if (!(p > 0.0)) {
        throw ValidationError("non-positive price " + cells[j + 1] +
                                  " at row " + std::to_string(row_no) +
                                  ", column " + std::to_string(j + 2),
                              row_no, static_cast<long>(j + 2));
      }
      prices[j] = p;
    }
    dates.push_back(cells[0]);
    rows.push_back(std::move(prices));
  }

  const std::size_t n_days = dates.size();
  if (n_days < 3) {
    throw ValidationError("need at least 3 price rows, got " +
                          std::to_string(n_days));
  }

  PriceTable table;
  table.tickers.assign(header.begin() + 1, header.end());
  table.dates = std::move(dates);
  table.prices = RealMatrix(n_assets, n_days);
  for (std::size_t t = 0; t < n_days; ++t) {
    for (std::size_t n = 0; n < n_assets; ++n) {
      table.prices(n, t) = rows[t][n];
    }
  }
  return table;
}

PriceTable load_prices_file(const std::filesystem::path& path,
                            const CsvLayout& layout) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open price file: " + path.string());
  }
  return load_prices(in, layout);
}

ReturnTable compute_returns(const PriceTable& table) {
  const std::size_t n = table.asset_count();
  const std::size_t p = table.day_count();
  ReturnTable out;
  out.tickers = table.tickers;
  out.returns = RealMatrix(n, p - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t + 1 < p; ++t) {
      out.returns(i, t) =
          (table.prices(i, t + 1) - table.prices(i, t)) / table.prices(i, t);
    }
  }
  return out;
}

AssetStats estimate_stats(const ReturnTable& table) {
  const std::size_t n = table.asset_count();
  const std::size_t m = table.sample_count();
  if (m < 2) {
    throw InsufficientDataError("estimate_stats: need at least 2 returns, got " +
                                std::to_string(m));
  }

  AssetStats stats;
  stats.tickers = table.tickers;
  stats.sample_count = m;
  stats.r.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < m; ++t) acc += table.returns(i, t);
    stats.r[i] = acc / static_cast<double>(m);
  }

  stats.S = RealMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        acc += (table.returns(i, t) - stats.r[i]) *
               (table.returns(j, t) - stats.r[j]);
      }
      const double s = acc / static_cast<double>(m);
      stats.S(i, j) = s;
      stats.S(j, i) = s;  // symmetric by construction
    }
  }
  return stats;
}

}  // namespace marginopt::data
