#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "marginopt/market_data.hpp"
#include "marginopt/rng.hpp"

using namespace marginopt;
using namespace marginopt::data;

namespace {

PriceTable from_csv(const std::string& text) {
  std::istringstream in(text);
  return load_prices(in);
}

ReturnTable returns_of(std::vector<std::string> tickers,
                       const std::vector<std::vector<double>>& rows) {
  ReturnTable t;
  t.tickers = std::move(tickers);
  t.returns = RealMatrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.returns(i, j) = rows[i][j];
  }
  return t;
}

}  // namespace

TEST_CASE("load_prices: minimal one-ticker table") {
  auto table = from_csv("date,AAA\nd1,100\nd2,110\nd3,99\n");
  CHECK(table.asset_count() == 1);
  CHECK(table.day_count() == 3);
  CHECK(table.prices(0, 0) == 100.0);
  CHECK(table.prices(0, 2) == 99.0);
  CHECK(table.tickers[0] == "AAA");
}

TEST_CASE("load_prices: empty cell is rejected with its location") {
  try {
    from_csv("date,AAA\nd1,100\nd2,\nd3,99\n");
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(e.row == 3);
    CHECK(e.column == 2);
  }
}

TEST_CASE("load_prices: non-positive price rejected") {
  CHECK_THROWS_AS(from_csv("date,AAA\nd1,100\nd2,-5\nd3,99\n"), ValidationError);
  CHECK_THROWS_AS(from_csv("date,AAA\nd1,100\nd2,0\nd3,99\n"), ValidationError);
}

TEST_CASE("load_prices: non-increasing dates rejected") {
  CHECK_THROWS_AS(from_csv("date,AAA\nd2,100\nd1,110\nd3,99\n"), ValidationError);
  CHECK_THROWS_AS(from_csv("date,AAA\nd1,100\nd1,110\nd3,99\n"), ValidationError);
}

TEST_CASE("load_prices: fewer than three rows rejected") {
  CHECK_THROWS_AS(from_csv("date,AAA\nd1,100\nd2,110\n"), ValidationError);
}

TEST_CASE("load_prices: unparseable price names the cell") {
  try {
    from_csv("date,AAA,BBB\nd1,100,50\nd2,1x0,51\nd3,99,52\n");
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(e.row == 3);
    CHECK(e.column == 2);
  }
}

TEST_CASE("load_prices: synthetic two-ticker 301-row table round-trips") {
  rng::Rng gen(31415);
  std::ostringstream csv;
  csv.precision(17);
  csv << "date,X1,X2\n";
  double p1 = 100.0;
  double p2 = 40.0;
  std::vector<double> want1;
  std::vector<double> want2;
  for (int t = 0; t < 301; ++t) {
    char label[16];
    std::snprintf(label, sizeof label, "d%04d", t);
    csv << label << ',' << p1 << ',' << p2 << '\n';
    want1.push_back(p1);
    want2.push_back(p2);
    p1 *= 1.0 + 0.01 * gen.normal();
    p2 *= 1.0 + 0.02 * gen.normal();
  }
  auto table = from_csv(csv.str());
  CHECK(table.asset_count() == 2);
  CHECK(table.day_count() == 301);
  for (int t = 0; t < 301; ++t) {
    CHECK(table.prices(0, t) == doctest::Approx(want1[t]).epsilon(1e-12));
    CHECK(table.prices(1, t) == doctest::Approx(want2[t]).epsilon(1e-12));
  }
}

TEST_CASE("compute_returns: hand arithmetic") {
  auto table = from_csv("date,AAA\nd1,100\nd2,110\nd3,99\n");
  auto rt = compute_returns(table);
  CHECK(rt.sample_count() == 2);
  CHECK(rt.returns(0, 0) == doctest::Approx(0.10).epsilon(1e-15));
  CHECK(rt.returns(0, 1) == doctest::Approx(-0.10).epsilon(1e-15));
}

TEST_CASE("compute_returns: constant prices give zero returns") {
  auto rt = compute_returns(from_csv("date,AAA\nd1,50\nd2,50\nd3,50\n"));
  CHECK(rt.returns(0, 0) == 0.0);
  CHECK(rt.returns(0, 1) == 0.0);
}

TEST_CASE("compute_returns: doubling sequence") {
  auto rt = compute_returns(from_csv("date,AAA\nd1,1\nd2,2\nd3,4\nd4,8\n"));
  for (std::size_t t = 0; t < 3; ++t) CHECK(rt.returns(0, t) == doctest::Approx(1.0));
}

TEST_CASE("estimate_stats: two-point variance with population normalization") {
  auto stats = estimate_stats(returns_of({"A"}, {{0.10, -0.10}}));
  CHECK(stats.r[0] == doctest::Approx(0.0));
  CHECK(stats.S(0, 0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(stats.sample_count == 2);
}

TEST_CASE("estimate_stats: identical assets give a rank-1 covariance") {
  auto stats = estimate_stats(
      returns_of({"A", "B"}, {{0.02, -0.01, 0.03}, {0.02, -0.01, 0.03}}));
  CHECK(stats.S(0, 0) == doctest::Approx(stats.S(0, 1)).epsilon(1e-15));
  CHECK(stats.S(1, 1) == doctest::Approx(stats.S(1, 0)).epsilon(1e-15));
  // Rank 1: determinant vanishes.
  CHECK(std::abs(stats.S(0, 0) * stats.S(1, 1) - stats.S(0, 1) * stats.S(1, 0)) <
        1e-18);
}

TEST_CASE("estimate_stats: matches an independent double-loop oracle") {
  rng::Rng gen(8675309);
  const std::size_t n = 3;
  const std::size_t m = 50;
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (auto& row : rows) {
    for (auto& x : row) x = 0.01 * gen.normal();
  }
  auto stats = estimate_stats(returns_of({"A", "B", "C"}, rows));

  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t t = 0; t < m; ++t) mean += rows[i][t];
    mean /= static_cast<double>(m);
    CHECK(std::abs(stats.r[i] - mean) < 1e-16);
    for (std::size_t j = 0; j < n; ++j) {
      double cov = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        cov += (rows[i][t] - mean) *
               (rows[j][t] - (stats.r[j]));
      }
      cov /= static_cast<double>(m);
      CHECK(std::abs(stats.S(i, j) - cov) < 1e-14);
    }
  }
}

TEST_CASE("estimate_stats: fewer than two samples rejected") {
  ReturnTable t;
  t.tickers = {"A"};
  t.returns = RealMatrix(1, 1);
  t.returns(0, 0) = 0.05;
  CHECK_THROWS_AS(estimate_stats(t), InsufficientDataError);
}

TEST_CASE("estimate_stats: invariance under permuting time columns") {
  rng::Rng gen(5551212);
  const std::size_t m = 20;
  std::vector<std::vector<double>> rows(2, std::vector<double>(m));
  for (auto& row : rows) {
    for (auto& x : row) x = 0.02 * gen.normal();
  }
  auto base = estimate_stats(returns_of({"A", "B"}, rows));

  // Deterministic shuffle of the time axis.
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = (7 * i + 3) % m;
  std::vector<std::vector<double>> shuffled(2, std::vector<double>(m));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t t = 0; t < m; ++t) shuffled[i][t] = rows[i][perm[t]];
  }
  auto permuted = estimate_stats(returns_of({"A", "B"}, shuffled));

  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(permuted.r[i] == doctest::Approx(base.r[i]).epsilon(1e-14));
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(permuted.S(i, j) == doctest::Approx(base.S(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("estimate_stats: shift and scale covariances behave") {
  rng::Rng gen(4096);
  const std::size_t m = 30;
  std::vector<std::vector<double>> rows(2, std::vector<double>(m));
  for (auto& row : rows) {
    for (auto& x : row) x = 0.01 * gen.normal();
  }
  auto base = estimate_stats(returns_of({"A", "B"}, rows));

  SUBCASE("adding a constant shifts the mean, not the covariance") {
    const double c = 0.005;
    auto shifted_rows = rows;
    for (auto& x : shifted_rows[0]) x += c;
    auto shifted = estimate_stats(returns_of({"A", "B"}, shifted_rows));
    CHECK(shifted.r[0] == doctest::Approx(base.r[0] + c).epsilon(1e-12));
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(shifted.S(i, j) - base.S(i, j)) < 1e-12);
      }
    }
  }

  SUBCASE("scaling one asset scales its row, column and variance") {
    const double alpha = 3.0;
    auto scaled_rows = rows;
    for (auto& x : scaled_rows[1]) x *= alpha;
    auto scaled = estimate_stats(returns_of({"A", "B"}, scaled_rows));
    CHECK(scaled.S(1, 1) ==
          doctest::Approx(alpha * alpha * base.S(1, 1)).epsilon(1e-12));
    CHECK(scaled.S(0, 1) == doctest::Approx(alpha * base.S(0, 1)).epsilon(1e-12));
    CHECK(scaled.S(1, 0) == doctest::Approx(alpha * base.S(1, 0)).epsilon(1e-12));
    CHECK(scaled.S(0, 0) == doctest::Approx(base.S(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("estimate_stats: diagonal nonnegative and S positive semidefinite") {
  rng::Rng gen(777);
  const std::size_t n = 6;
  const std::size_t m = 40;
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (auto& row : rows) {
    for (auto& x : row) x = 0.015 * gen.normal();
  }
  auto stats = estimate_stats(
      returns_of({"A", "B", "C", "D", "E", "F"}, rows));
  for (std::size_t i = 0; i < n; ++i) CHECK(stats.S(i, i) >= 0.0);

  auto dec = linalg::sym_eig_decomposition(stats.S);
  CHECK(dec.values.front() >= -1e-12 * linalg::frobenius_norm(stats.S));
}
