#include "marginopt/orthant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "marginopt/errors.hpp"
#include "marginopt/rng.hpp"

namespace marginopt::orthant {

namespace {

bool same_weights(const RealVector& a, const RealVector& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

std::vector<int> signs_of_pattern(std::size_t pattern, std::size_t n) {
  std::vector<int> signs(n);
  for (std::size_t i = 0; i < n; ++i) {
    signs[i] = (pattern >> i) & 1u ? -1 : 1;
  }
  return signs;
}

std::vector<OrthantSolution> run_enumeration(const data::AssetStats& stats,
                                             double lambda, double gamma,
                                             double wealth, bool parallel) {
  const std::size_t n = stats.size();
  if (n > kMaxAssets) {
    throw SizeCapError("enumerate_orthants: N=" + std::to_string(n) +
                       " exceeds the 2^N cap (N <= " +
                       std::to_string(kMaxAssets) + ")");
  }
  const std::size_t patterns = std::size_t{1} << n;

  std::vector<OrthantSolution> slots(patterns);
  std::vector<char> ok(patterns, 0);

  if (parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long long p = 0; p < static_cast<long long>(patterns); ++p) {
      try {
        slots[static_cast<std::size_t>(p)] =
            solve_orthant(stats, lambda,
                          signs_of_pattern(static_cast<std::size_t>(p), n),
                          gamma, wealth);
        ok[static_cast<std::size_t>(p)] = 1;
      } catch (const SingularSystemError&) {
        // Degenerate orthant: counted as absent, not as a solution.
      }
    }
  } else {
    for (std::size_t p = 0; p < patterns; ++p) {
      try {
        slots[p] = solve_orthant(stats, lambda, signs_of_pattern(p, n), gamma,
                                 wealth);
        ok[p] = 1;
      } catch (const SingularSystemError&) {
      }
    }
  }

  std::vector<OrthantSolution> feasible;
  for (std::size_t p = 0; p < patterns; ++p) {
    if (!ok[p] || !slots[p].feasible) continue;
    bool duplicate = false;
    for (const auto& kept : feasible) {
      if (same_weights(kept.weights, slots[p].weights, 1e-9)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) feasible.push_back(std::move(slots[p]));
  }
  return feasible;
}

}  // namespace

data::AssetStats random_instance(std::size_t n, std::uint64_t seed) {
  rng::Rng gen(seed);
  RealMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g(i, j) = gen.normal();
  }
  data::AssetStats stats;
  stats.tickers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    stats.tickers[i] = "A" + std::to_string(i + 1);
  }
  stats.S = RealMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += g(k, i) * g(k, j);
      acc /= static_cast<double>(n);
      // The ridge keeps the smallest eigenvalue away from the Wishart hard
      // edge; without it S^{-1} is dominated by one eigendirection at these
      // sizes and nearly every orthant becomes infeasible.
      if (i == j) acc += 0.5;
      stats.S(i, j) = acc;
      stats.S(j, i) = acc;
    }
  }
  stats.r.resize(n);
  for (std::size_t i = 0; i < n; ++i) stats.r[i] = 0.01 * gen.normal();
  return stats;
}

data::AssetStats isotropic_instance(std::size_t n) {
  data::AssetStats stats;
  stats.tickers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    stats.tickers[i] = "A" + std::to_string(i + 1);
  }
  stats.S = RealMatrix::identity(n);
  stats.r.assign(n, 0.0);
  return stats;
}

OrthantSolution solve_orthant(const data::AssetStats& stats, double lambda,
                              const std::vector<int>& signs, double gamma,
                              double wealth) {
  const std::size_t n = stats.size();
  if (signs.size() != n) {
    throw DimensionError("solve_orthant: sign pattern length mismatch");
  }
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw ValidationError("solve_orthant: lambda must lie in (0,1]");
  }

  // KKT system of min lambda w^T S w - (1-lambda) r^T w
  //            s.t. gamma * signs^T w = W:
  //   [2 lambda S   -gamma*signs] [w  ]   [(1-lambda) r]
  //   [gamma*signs^T     0      ] [eta] = [     W      ]
  RealMatrix kkt(n + 1, n + 1);
  RealVector rhs(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      kkt(i, j) = 2.0 * lambda * stats.S(i, j);
    }
    kkt(i, n) = -gamma * signs[i];
    kkt(n, i) = gamma * signs[i];
    rhs[i] = (1.0 - lambda) * stats.r[i];
  }
  rhs[n] = wealth;

  const RealVector sol = linalg::solve_real(kkt, rhs);

  OrthantSolution out;
  out.signs = signs;
  out.weights.assign(sol.begin(), sol.begin() + static_cast<long>(n));
  out.multiplier = sol[n];

  out.feasible = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (signs[i] * out.weights[i] < -1e-12) {
      out.feasible = false;
      break;
    }
  }

  const RealVector sw = linalg::multiply(stats.S, out.weights);
  const double risk_sq = linalg::dot(out.weights, sw);
  out.risk = std::sqrt(std::max(0.0, risk_sq));
  out.ret = linalg::dot(out.weights, stats.r);
  out.objective = lambda * risk_sq - (1.0 - lambda) * out.ret;
  return out;
}

std::vector<OrthantSolution> enumerate_orthants(const data::AssetStats& stats,
                                                double lambda, double gamma,
                                                double wealth) {
  return run_enumeration(stats, lambda, gamma, wealth, true);
}

std::vector<OrthantSolution> enumerate_orthants_serial(
    const data::AssetStats& stats, double lambda, double gamma, double wealth) {
  return run_enumeration(stats, lambda, gamma, wealth, false);
}

MultiplicityReport multiplicity_scan(std::size_t n_lo, std::size_t n_hi,
                                     std::uint64_t instance_seed, double lambda,
                                     double gamma, double wealth,
                                     InstanceKind kind) {
  if (n_lo == 0 || n_lo > n_hi) {
    throw ValidationError("multiplicity_scan: bad N range");
  }
  if (n_hi > kMaxAssets) {
    throw SizeCapError("multiplicity_scan: N=" + std::to_string(n_hi) +
                       " exceeds the 2^N cap (N <= " +
                       std::to_string(kMaxAssets) + ")");
  }

  MultiplicityReport report;
  report.instance_seed = instance_seed;
  report.lambda = lambda;
  report.gamma = gamma;
  report.wealth = wealth;

  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    // Independent substream per problem size.
    std::uint64_t s = instance_seed;
    (void)rng::splitmix64(s);
    const std::uint64_t sub_seed = s ^ (0x9E3779B97F4A7C15ull * n);

    const data::AssetStats stats = kind == InstanceKind::kRandom
                                       ? random_instance(n, sub_seed)
                                       : isotropic_instance(n);
    const auto optima = enumerate_orthants(stats, lambda, gamma, wealth);

    std::vector<double> objectives;
    objectives.reserve(optima.size());
    for (const auto& o : optima) objectives.push_back(o.objective);
    std::sort(objectives.begin(), objectives.end());
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < objectives.size(); ++i) {
      if (i == 0 ||
          objectives[i] - objectives[i - 1] >
              1e-9 * (1.0 + std::abs(objectives[i]))) {
        ++distinct;
      }
    }

    MultiplicityRow row;
    row.n_assets = n;
    row.optima_count = optima.size();
    row.objective_count = distinct;
    row.log_count =
        optima.empty() ? 0.0 : std::log(static_cast<double>(optima.size()));
    report.per_n.push_back(row);
  }
  return report;
}

}  // namespace marginopt::orthant
