#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "marginopt/orthant.hpp"
#include "test_support.hpp"

using namespace marginopt;
using namespace marginopt::orthant;
using marginopt::data::AssetStats;
using marginopt::linalg::RealMatrix;
using marginopt::linalg::RealVector;

namespace {

// 2000x2000 grid over [-k, k]^2 radially projected onto the constraint
// diamond gamma (|w1| + |w2|) = W; independent check of the enumerator.
double grid_best_objective(const AssetStats& stats, double lambda,
                           double gamma, double wealth, std::size_t grid) {
  const double k = wealth / gamma;
  double best = std::numeric_limits<double>::infinity();
  const double s00 = stats.S(0, 0);
  const double s01 = stats.S(0, 1);
  const double s11 = stats.S(1, 1);
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = -k + 2.0 * k * (static_cast<double>(i) + 0.5) /
                              static_cast<double>(grid);
    for (std::size_t j = 0; j < grid; ++j) {
      const double y = -k + 2.0 * k * (static_cast<double>(j) + 0.5) /
                                static_cast<double>(grid);
      const double l1 = std::abs(x) + std::abs(y);
      if (l1 < 1e-12) continue;
      const double scale = k / l1;
      const double w1 = x * scale;
      const double w2 = y * scale;
      const double risk_sq = s00 * w1 * w1 + 2.0 * s01 * w1 * w2 + s11 * w2 * w2;
      const double obj = lambda * risk_sq -
                         (1.0 - lambda) * (w1 * stats.r[0] + w2 * stats.r[1]);
      best = std::min(best, obj);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("solve_orthant: one asset is pinned by the constraint") {
  auto st = isotropic_instance(1);
  auto sol = solve_orthant(st, 0.7, {1}, 1.0, 1.0);
  CHECK(sol.feasible);
  CHECK(sol.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  auto neg = solve_orthant(st, 0.7, {-1}, 1.0, 1.0);
  CHECK(neg.feasible);
  CHECK(neg.weights[0] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("solve_orthant: hand-solved two-asset case") {
  auto st = isotropic_instance(2);
  auto sol = solve_orthant(st, 1.0, {1, 1}, 1.0, 1.0);
  CHECK(sol.feasible);
  CHECK(sol.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sol.weights[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sol.objective == doctest::Approx(0.5).epsilon(1e-14));

  auto mirror = solve_orthant(st, 1.0, {1, -1}, 1.0, 1.0);
  CHECK(mirror.feasible);
  CHECK(mirror.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mirror.weights[1] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(mirror.objective == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("solve_orthant: boundary solution with a zero weight is feasible") {
  AssetStats st;
  st.tickers = {"A1", "A2"};
  st.r = {0.0, 0.0};
  st.S = RealMatrix(2, 2, {1.0, 1.0, 1.0, 2.0});
  auto sol = solve_orthant(st, 1.0, {1, 1}, 1.0, 1.0);
  CHECK(sol.feasible);
  CHECK(sol.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(sol.weights[1]) < 1e-12);
}

TEST_CASE("solve_orthant: lambda = 0 is rejected") {
  auto st = isotropic_instance(2);
  CHECK_THROWS_AS(solve_orthant(st, 0.0, {1, 1}, 1.0, 1.0), ValidationError);
}

TEST_CASE("degenerate orthants raise and are skipped by the enumerator") {
  // S = 0 makes the KKT matrix singular for N >= 2.
  AssetStats st;
  st.tickers = {"A1", "A2"};
  st.r = {0.0, 0.0};
  st.S = RealMatrix(2, 2);
  CHECK_THROWS_AS(solve_orthant(st, 1.0, {1, 1}, 1.0, 1.0),
                  SingularSystemError);
  auto optima = enumerate_orthants(st, 1.0, 1.0, 1.0);
  CHECK(optima.empty());
}

TEST_CASE("enumerate_orthants: N=1 has exactly two optima") {
  auto st = random_instance(1, 42);
  auto optima = enumerate_orthants(st, 0.5, 1.0, 1.0);
  REQUIRE(optima.size() == 2);
  std::vector<double> w = {optima[0].weights[0], optima[1].weights[0]};
  std::sort(w.begin(), w.end());
  CHECK(w[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate_orthants: isotropic N=2 instance has four optima") {
  auto st = isotropic_instance(2);
  auto optima = enumerate_orthants(st, 1.0, 1.0, 1.0);
  CHECK(optima.size() == 4);
  for (const auto& o : optima) {
    CHECK(std::abs(std::abs(o.weights[0]) - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(o.weights[1]) - 0.5) < 1e-12);
    CHECK(o.objective == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("enumerate_orthants: mirrored solutions both kept with r = 0") {
  auto st = isotropic_instance(3);
  auto optima = enumerate_orthants(st, 1.0, 1.0, 1.0);
  CHECK(optima.size() == 8);
  for (const auto& a : optima) {
    bool mirror_found = false;
    for (const auto& b : optima) {
      bool mirror = true;
      for (std::size_t i = 0; i < 3; ++i) {
        if (std::abs(a.weights[i] + b.weights[i]) > 1e-12) {
          mirror = false;
          break;
        }
      }
      if (mirror) {
        mirror_found = true;
        break;
      }
    }
    CHECK(mirror_found);
  }
}

TEST_CASE("enumerate_orthants: feasibility and KKT invariants hold") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    auto st = random_instance(5, seed);
    const double gamma = 1.0;
    const double wealth = 1.0;
    const double lambda = 0.5;
    auto optima = enumerate_orthants(st, lambda, gamma, wealth);
    CHECK(!optima.empty());
    CHECK(optima.size() <= 32);
    for (const auto& o : optima) {
      double l1 = 0.0;
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(o.signs[i] * o.weights[i] >= -1e-12);
        l1 += std::abs(o.weights[i]);
      }
      CHECK(std::abs(gamma * l1 - wealth) <= 1e-10 * wealth);

      const RealVector sw = linalg::multiply(st.S, o.weights);
      double kkt = 0.0;
      for (std::size_t i = 0; i < 5; ++i) {
        const double g = 2.0 * lambda * sw[i] - (1.0 - lambda) * st.r[i] -
                         o.multiplier * gamma * o.signs[i];
        kkt += g * g;
      }
      CHECK(std::sqrt(kkt) <= 1e-8);
    }
  }
}

TEST_CASE("enumerate_orthants: parallel matches the serial reference") {
  auto st = random_instance(8, 1001);
  auto par = enumerate_orthants(st, 0.5, 1.0, 1.0);
  auto ser = enumerate_orthants_serial(st, 0.5, 1.0, 1.0);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].signs == ser[i].signs);
    CHECK(par[i].weights == ser[i].weights);
    CHECK(par[i].objective == ser[i].objective);
  }
}

TEST_CASE("enumerate_orthants: grid-search oracle at N=2") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    auto st = random_instance(2, seed);
    auto optima = enumerate_orthants(st, 0.5, 1.0, 1.0);
    REQUIRE(!optima.empty());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : optima) best = std::min(best, o.objective);
    const double grid_best = grid_best_objective(st, 0.5, 1.0, 1.0, 500);
    CHECK(std::abs(best - grid_best) < 1e-4);  // coarse grid here
    CHECK(best <= grid_best + 1e-12);
  }
}

TEST_CASE("enumerate_orthants: cap enforced") {
  auto st = isotropic_instance(2);
  AssetStats big;
  big.tickers.resize(17, "X");
  big.r.assign(17, 0.0);
  big.S = RealMatrix::identity(17);
  CHECK_THROWS_AS(enumerate_orthants(big, 0.5, 1.0, 1.0), SizeCapError);
}

TEST_CASE("multiplicity_scan: N=1 counts two optima") {
  auto report = multiplicity_scan(1, 1, 99, 0.5, 1.0, 1.0);
  REQUIRE(report.per_n.size() == 1);
  CHECK(report.per_n[0].optima_count == 2);
}

TEST_CASE("multiplicity_scan: deterministic for a fixed seed") {
  auto a = multiplicity_scan(2, 6, 12345, 0.5, 1.0, 1.0);
  auto b = multiplicity_scan(2, 6, 12345, 0.5, 1.0, 1.0);
  REQUIRE(a.per_n.size() == b.per_n.size());
  for (std::size_t i = 0; i < a.per_n.size(); ++i) {
    CHECK(a.per_n[i].optima_count == b.per_n[i].optima_count);
    CHECK(a.per_n[i].objective_count == b.per_n[i].objective_count);
    CHECK(a.per_n[i].log_count == b.per_n[i].log_count);
  }
}

TEST_CASE("multiplicity_scan: counts bounded by 2^N and growing in trend") {
  auto report = multiplicity_scan(2, 8, 2718, 0.5, 1.0, 1.0);
  REQUIRE(report.per_n.size() == 7);
  std::size_t prev = 0;
  for (const auto& row : report.per_n) {
    CHECK(row.optima_count >= 1);
    CHECK(row.optima_count <= (std::size_t{1} << row.n_assets));
    CHECK(row.objective_count <= row.optima_count);
    CHECK(row.optima_count >= prev);
    prev = row.optima_count;
  }
  // Exponential trend: the last count far exceeds the first.
  CHECK(report.per_n.back().optima_count > 4 * report.per_n.front().optima_count);
}

TEST_CASE("multiplicity_scan: isotropic instances count the full 2^N") {
  auto report =
      multiplicity_scan(1, 2, 0, 1.0, 1.0, 1.0, InstanceKind::kIsotropic);
  REQUIRE(report.per_n.size() == 2);
  CHECK(report.per_n[0].optima_count == 2);
  CHECK(report.per_n[1].optima_count == 4);
}

TEST_CASE("multiplicity_scan: cap violation raises") {
  CHECK_THROWS_AS(multiplicity_scan(2, 17, 1, 0.5, 1.0, 1.0), SizeCapError);
}
