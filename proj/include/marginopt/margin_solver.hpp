#pragma once

#include <complex>
#include <vector>

#include "marginopt/linalg.hpp"
#include "marginopt/market_data.hpp"

namespace marginopt::solver {

using linalg::Complex;
using linalg::ComplexVector;
using linalg::RealMatrix;
using linalg::RealVector;

/// Parameters of the norm-constrained mean-variance problem and the numeric
/// tolerances used while solving it. The margin fraction gamma and wealth W
/// enter only through the norm budget k = W / gamma.
struct SolverConfig {
  double gamma = 1.0;
  double wealth = 1.0;
  std::size_t lambda_steps = 1000;  // grid lambda_t = t / lambda_steps

  double residual_tol = 1e-6;
  double imag_tol_coeff = 1e-9;          // tau(x) = coeff * (1 + x)
  double resolvent_condition_cap = 1e12;
  double sym_tol = 1e-10;
  double eig_tol = 1e-8;
  int max_qr_sweeps_per_dim = 40;
  bool sharpe_include_complex_parts = false;

  double norm_budget() const { return wealth / gamma; }
  void validate() const;
};

enum class SolutionKind { kReal, kComplex };

enum class RejectReason {
  kNone,
  kIllConditionedResolvent,  // mu too close to an eigenvalue of lambda*S
  kResidualTooLarge,
};

/// Lagrange multiplier with its candidate weight vector.
struct EigenPair {
  Complex mu;
  ComplexVector w;
};

/// One stationary-point candidate at a fixed lambda, annotated with the
/// residual diagnostics that decide acceptance.
struct CandidateSolution {
  double lambda = 0.0;
  EigenPair pair;
  double stationarity_residual = 0.0;  // ||2*lambda*S w - (1-lambda) r - 2 mu w||
  double norm_residual = 0.0;          // |w^T w - k|
  double secular_residual = 0.0;
  double resolvent_condition = 0.0;
  SolutionKind kind = SolutionKind::kReal;
  bool accepted = false;
  RejectReason reject_reason = RejectReason::kNone;

  bool is_real() const { return kind == SolutionKind::kReal; }
};

/// Block companion matrix [[0, I], [A, B]] of the quadratic eigenvalue
/// condition, with A = (1-lambda)^2/(4k) r r^T - lambda^2 S^2 and
/// B = 2 lambda S. Its 2N eigenvalues are the Lagrange multipliers mu.
RealMatrix build_companion(const data::AssetStats& stats, double lambda,
                           double k);

/// w = (1/2)(1-lambda) (lambda S - mu I)^{-1} r. Throws ResolventError when
/// the resolvent is numerically singular or its condition exceeds `cap`.
ComplexVector recover_portfolio(const data::AssetStats& stats, double lambda,
                                Complex mu, double cap = 1e12);

/// ||2 lambda S w - (1 - lambda) r - 2 mu w||_2
double stationarity_residual(const data::AssetStats& stats, double lambda,
                             Complex mu, const ComplexVector& w);

/// |(1/4)(1-lambda)^2 r^T (lambda S - mu I)^{-2} r - k|
double secular_residual(const data::AssetStats& stats, double lambda,
                        Complex mu, double k);

/// All 2N candidates at an interior lambda: eigenvalues of the companion
/// matrix, portfolios recovered through the resolvent, residual-screened.
/// Spurious roots stay in the list with accepted == false.
std::vector<CandidateSolution> solve_lambda(const data::AssetStats& stats,
                                            double lambda,
                                            const SolverConfig& cfg);

/// lambda = 1 (pure risk minimization): the N eigenpairs of S scaled to the
/// norm budget.
std::vector<CandidateSolution> solve_lambda_one(const data::AssetStats& stats,
                                                const SolverConfig& cfg);

/// lambda = 0 (pure return maximization): w = sqrt(k) r / ||r||.
CandidateSolution solve_lambda_zero(const data::AssetStats& stats,
                                    const SolverConfig& cfg);

}  // namespace marginopt::solver
