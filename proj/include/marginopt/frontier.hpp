#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "marginopt/margin_solver.hpp"
#include "marginopt/market_data.hpp"

namespace marginopt::frontier {

using linalg::Complex;
using linalg::ComplexVector;
using linalg::RealVector;

/// How a record was obtained: a fully real solution, or the real/imaginary
/// component of a complex one.
enum class RecordKind { kReal = 0, kRealPart = 1, kImagPart = 2 };

const char* record_kind_name(RecordKind kind);

/// One point of the solution cloud: weights after sign normalization
/// (w^T r >= 0), risk s = sqrt(w^T S w), return rho = |w^T r|, Sharpe ratio
/// xi = rho / s, and the provenance of the underlying candidate.
struct PortfolioRecord {
  RealVector weights;
  double risk = 0.0;
  double ret = 0.0;
  double sharpe = 0.0;  // 0 when risk == 0; such records never rank
  double lambda = 0.0;
  Complex mu;
  RecordKind kind = RecordKind::kReal;
  double stationarity_residual = 0.0;
  double norm_residual = 0.0;
};

struct SweepDiagnostics {
  std::size_t interior_eigenvalues = 0;  // candidates over interior grid points
  std::size_t endpoint_candidates = 0;   // lambda = 0 and lambda = 1 solutions
  std::size_t accepted_real = 0;
  std::size_t accepted_complex = 0;      // counted per eigenvalue, both twins
  std::size_t spurious = 0;              // interior candidates not accepted
  std::vector<double> lambdas_without_solutions;

  std::size_t eigenvalues_examined() const {
    return interior_eigenvalues + endpoint_candidates;
  }
};

/// Full sweep output: records sorted by (lambda, Re mu, kind), the index of
/// the maximum-Sharpe record under the configured ranking policy, and a
/// fingerprint of the input statistics.
struct FrontierSet {
  std::vector<PortfolioRecord> records;
  std::vector<double> lambda_grid;
  std::optional<std::size_t> max_sharpe_index;
  std::uint64_t stats_fingerprint = 0;
  bool sharpe_includes_complex_parts = false;
  SweepDiagnostics diagnostics;
};

/// Risk/return evaluation of a real weight vector with the sign convention
/// applied; lambda/mu/kind are left for the caller to fill.
PortfolioRecord evaluate_real(const RealVector& w, const data::AssetStats& stats);

/// Real- and imaginary-part records of a complex weight vector; components
/// with (relatively) zero norm are skipped.
std::vector<PortfolioRecord> decompose_complex(const ComplexVector& w,
                                               const data::AssetStats& stats);

/// Sweep the grid lambda_t = t / lambda_steps, t = 0..lambda_steps. Interior
/// points go through solve_lambda, the endpoints through their dedicated
/// solvers. Accepted real candidates produce one record each; accepted
/// complex candidates are deduplicated to the Im(mu) > 0 representative and
/// decomposed. The OpenMP build fans grid points out to parallel workers;
/// output is canonically ordered either way.
FrontierSet sweep(const data::AssetStats& stats, const solver::SolverConfig& cfg);

/// Single-threaded reference implementation used to validate the parallel
/// kernel; identical output, including bitwise weights.
FrontierSet sweep_serial(const data::AssetStats& stats,
                         const solver::SolverConfig& cfg);

/// Record with maximal Sharpe ratio among eligible records (risk > 0, real
/// kind unless the set was built to rank complex parts). Ties break to the
/// smallest lambda, then the smallest risk.
const PortfolioRecord& max_sharpe(const FrontierSet& fs);

/// One point of the classical wealth-constrained frontier.
struct ClassicalPoint {
  double risk = 0.0;
  double ret = 0.0;
  RealVector weights;
};

/// Textbook minimum-variance frontier under sum(w) = 1, traced over a return
/// grid spanning [min r_n, max r_n].
std::vector<ClassicalPoint> classical_frontier(const data::AssetStats& stats,
                                               std::size_t n_points);

}  // namespace marginopt::frontier
