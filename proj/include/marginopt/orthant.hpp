#pragma once

#include <cstdint>
#include <vector>

#include "marginopt/market_data.hpp"

namespace marginopt::orthant {

using linalg::RealMatrix;
using linalg::RealVector;

/// Hard cap on 2^N enumeration.
inline constexpr std::size_t kMaxAssets = 16;

/// Stationary point of the objective restricted to one sign pattern of the
/// absolute-value margin constraint gamma * sum |w_n| = W.
struct OrthantSolution {
  std::vector<int> signs;  // entries +-1
  RealVector weights;
  double risk = 0.0;
  double ret = 0.0;
  double objective = 0.0;   // lambda w^T S w - (1-lambda) w^T r
  double multiplier = 0.0;  // KKT multiplier of the linearized constraint
  bool feasible = false;    // solution respects its orthant
};

/// Counts of distinct local optima per problem size.
struct MultiplicityRow {
  std::size_t n_assets = 0;
  std::size_t optima_count = 0;
  std::size_t objective_count = 0;  // distinct objective values
  double log_count = 0.0;
};

struct MultiplicityReport {
  std::vector<MultiplicityRow> per_n;
  std::uint64_t instance_seed = 0;
  double lambda = 0.0;
  double gamma = 0.0;
  double wealth = 0.0;
};

enum class InstanceKind {
  kRandom,     // S = G^T G / N + ridge, r ~ 0.01 * normal
  kIsotropic,  // S = I, r = 0
};

/// Seeded random instance: covariance G^T G / N from standard-normal G plus
/// a 0.5 ridge (keeps small instances away from the Wishart hard edge);
/// returns standard normal scaled by 0.01.
data::AssetStats random_instance(std::size_t n, std::uint64_t seed);
data::AssetStats isotropic_instance(std::size_t n);

/// Equality-constrained minimization of lambda w^T S w - (1-lambda) w^T r
/// subject to gamma * signs^T w = W, via the single-multiplier KKT system.
/// Throws SingularSystemError when the KKT matrix is degenerate.
OrthantSolution solve_orthant(const data::AssetStats& stats, double lambda,
                              const std::vector<int>& signs, double gamma,
                              double wealth);

/// All 2^N sign patterns, feasible local optima only, deduplicated by
/// infinity-norm proximity (boundary solutions with zero components appear in
/// several orthants). OpenMP fan-out over patterns; deterministic order.
std::vector<OrthantSolution> enumerate_orthants(const data::AssetStats& stats,
                                                double lambda, double gamma,
                                                double wealth);

/// Single-threaded reference for the parallel enumerator.
std::vector<OrthantSolution> enumerate_orthants_serial(
    const data::AssetStats& stats, double lambda, double gamma, double wealth);

/// Run the enumerator over a range of sizes on seeded instances and report
/// the multiplicity counts.
MultiplicityReport multiplicity_scan(std::size_t n_lo, std::size_t n_hi,
                                     std::uint64_t instance_seed, double lambda,
                                     double gamma, double wealth,
                                     InstanceKind kind = InstanceKind::kRandom);

}  // namespace marginopt::orthant
