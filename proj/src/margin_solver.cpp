#include "marginopt/margin_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "marginopt/errors.hpp"

namespace marginopt::solver {

namespace {

using linalg::ComplexLu;
using linalg::ComplexMatrix;

ComplexMatrix resolvent_matrix(const data::AssetStats& stats, double lambda,
                               Complex mu) {
  const std::size_t n = stats.size();
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = Complex(lambda * stats.S(i, j), 0.0);
    }
    a(i, i) -= mu;
  }
  return a;
}

double max_abs(const ComplexVector& v) {
  double m = 0.0;
  for (const Complex& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(gamma > 0.0)) throw ValidationError("SolverConfig: gamma must be > 0");
  if (!(wealth > 0.0)) throw ValidationError("SolverConfig: wealth must be > 0");
  if (lambda_steps < 2) {
    throw ValidationError("SolverConfig: lambda_steps must be >= 2");
  }
}

RealMatrix build_companion(const data::AssetStats& stats, double lambda,
                           double k) {
  const std::size_t n = stats.size();
  const RealMatrix s_sq = linalg::multiply(stats.S, stats.S);
  const double rank_one = (1.0 - lambda) * (1.0 - lambda) / (4.0 * k);
  const double lambda_sq = lambda * lambda;

  RealMatrix m(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, n + i) = 1.0;  // identity block
    for (std::size_t j = 0; j < n; ++j) {
      m(n + i, j) = rank_one * stats.r[i] * stats.r[j] - lambda_sq * s_sq(i, j);
      m(n + i, n + j) = 2.0 * lambda * stats.S(i, j);
    }
  }
  return m;
}

ComplexVector recover_portfolio(const data::AssetStats& stats, double lambda,
                                Complex mu, double cap) {
  if (!(lambda < 1.0)) {
    throw ValidationError("recover_portfolio: requires lambda < 1");
  }
  ComplexLu lu(resolvent_matrix(stats, lambda, mu));
  const double cond = lu.condition_proxy();
  if (lu.singular() || cond > cap) {
    throw ResolventError(
        "recover_portfolio: resolvent numerically singular at mu=(" +
            std::to_string(mu.real()) + "," + std::to_string(mu.imag()) + ")",
        cond);
  }
  const std::size_t n = stats.size();
  ComplexVector rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = Complex(stats.r[i], 0.0);
  ComplexVector w = lu.solve(rhs);
  const Complex scale(0.5 * (1.0 - lambda), 0.0);
  for (Complex& x : w) x *= scale;
  return w;
}

double stationarity_residual(const data::AssetStats& stats, double lambda,
                             Complex mu, const ComplexVector& w) {
  const std::size_t n = stats.size();
  ComplexVector sw = linalg::multiply(stats.S, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex g =
        2.0 * lambda * sw[i] - (1.0 - lambda) * stats.r[i] - 2.0 * mu * w[i];
    acc += std::norm(g);
  }
  return std::sqrt(acc);
}

double secular_residual(const data::AssetStats& stats, double lambda,
                        Complex mu, double k) {
  if (!(lambda < 1.0)) {
    throw ValidationError("secular_residual: requires lambda < 1");
  }
  ComplexLu lu(resolvent_matrix(stats, lambda, mu));
  if (lu.singular()) {
    throw ResolventError("secular_residual: resolvent singular",
                         lu.condition_proxy());
  }
  const std::size_t n = stats.size();
  ComplexVector rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = Complex(stats.r[i], 0.0);
  // (lambda S - mu I) is complex-symmetric, so r^T A^{-2} r = x^T x with
  // A x = r (bilinear, unconjugated).
  const ComplexVector x = lu.solve(rhs);
  const Complex quad = linalg::bilinear_dot(x, x);
  const double c = 0.25 * (1.0 - lambda) * (1.0 - lambda);
  return std::abs(c * quad - Complex(k, 0.0));
}

namespace {

// With r = 0 the resolvent recovery degenerates (every companion eigenvalue
// sits on a pole); the stationarity system is then the plain eigenproblem of
// S and the norm constraint fixes the scale.
std::vector<CandidateSolution> eigenbasis_candidates(
    const data::AssetStats& stats, double lambda, const SolverConfig& cfg) {
  const double k = cfg.norm_budget();
  const auto dec = linalg::sym_eig_decomposition(stats.S, cfg.sym_tol);
  const std::size_t n = stats.size();
  std::vector<CandidateSolution> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    CandidateSolution cand;
    cand.lambda = lambda;
    cand.pair.mu = Complex(lambda * dec.values[j], 0.0);
    cand.pair.w.resize(n);
    const double scale = std::sqrt(k);
    for (std::size_t i = 0; i < n; ++i) {
      cand.pair.w[i] = Complex(scale * dec.vectors(i, j), 0.0);
    }
    cand.stationarity_residual =
        stationarity_residual(stats, lambda, cand.pair.mu, cand.pair.w);
    cand.norm_residual =
        std::abs(linalg::bilinear_dot(cand.pair.w, cand.pair.w) - Complex(k, 0.0));
    cand.secular_residual = cand.norm_residual;
    cand.kind = SolutionKind::kReal;
    cand.accepted = true;
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace

std::vector<CandidateSolution> solve_lambda(const data::AssetStats& stats,
                                            double lambda,
                                            const SolverConfig& cfg) {
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    throw ValidationError("solve_lambda: lambda must lie in (0,1), got " +
                          std::to_string(lambda));
  }
  cfg.validate();
  const double k = cfg.norm_budget();
  const double r_norm = linalg::norm2(stats.r);

  if (r_norm == 0.0) return eigenbasis_candidates(stats, lambda, cfg);

  const RealMatrix companion = build_companion(stats, lambda, k);
  const linalg::Spectrum spec = linalg::general_eig(
      companion, false, cfg.eig_tol, cfg.max_qr_sweeps_per_dim);

  const double station_bound = cfg.residual_tol * (1.0 + r_norm);
  const double norm_bound = cfg.residual_tol * k;

  std::vector<CandidateSolution> out;
  out.reserve(spec.eigenvalues.size());
  for (const Complex& mu : spec.eigenvalues) {
    CandidateSolution cand;
    cand.lambda = lambda;
    cand.pair.mu = mu;

    ComplexLu lu(resolvent_matrix(stats, lambda, mu));
    cand.resolvent_condition = lu.condition_proxy();
    if (lu.singular() || cand.resolvent_condition > cfg.resolvent_condition_cap) {
      cand.kind = std::abs(mu.imag()) <=
                          linalg::imag_tolerance(std::abs(mu), cfg.imag_tol_coeff)
                      ? SolutionKind::kReal
                      : SolutionKind::kComplex;
      cand.accepted = false;
      cand.reject_reason = RejectReason::kIllConditionedResolvent;
      out.push_back(std::move(cand));
      continue;
    }

    const std::size_t n = stats.size();
    ComplexVector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = Complex(stats.r[i], 0.0);
    ComplexVector w = lu.solve(rhs);
    const double scale = 0.5 * (1.0 - lambda);
    for (Complex& x : w) x *= scale;
    cand.pair.w = std::move(w);

    cand.stationarity_residual =
        stationarity_residual(stats, lambda, mu, cand.pair.w);
    cand.norm_residual = std::abs(
        linalg::bilinear_dot(cand.pair.w, cand.pair.w) - Complex(k, 0.0));
    cand.secular_residual = cand.norm_residual;

    const bool mu_real =
        std::abs(mu.imag()) <=
        linalg::imag_tolerance(std::abs(mu), cfg.imag_tol_coeff);
    double max_imag_w = 0.0;
    for (const Complex& x : cand.pair.w) {
      max_imag_w = std::max(max_imag_w, std::abs(x.imag()));
    }
    const bool w_real =
        max_imag_w <=
        linalg::imag_tolerance(max_abs(cand.pair.w), cfg.imag_tol_coeff);
    cand.kind = (mu_real && w_real) ? SolutionKind::kReal : SolutionKind::kComplex;

    if (cand.stationarity_residual <= station_bound &&
        cand.norm_residual <= norm_bound) {
      cand.accepted = true;
    } else {
      cand.accepted = false;
      cand.reject_reason = RejectReason::kResidualTooLarge;
    }
    out.push_back(std::move(cand));
  }
  return out;
}

std::vector<CandidateSolution> solve_lambda_one(const data::AssetStats& stats,
                                                const SolverConfig& cfg) {
  cfg.validate();
  const double k = cfg.norm_budget();
  const auto dec = linalg::sym_eig_decomposition(stats.S, cfg.sym_tol);
  const std::size_t n = stats.size();

  std::vector<CandidateSolution> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    CandidateSolution cand;
    cand.lambda = 1.0;
    cand.pair.mu = Complex(dec.values[j], 0.0);
    cand.pair.w.resize(n);
    const double scale = std::sqrt(k);
    for (std::size_t i = 0; i < n; ++i) {
      cand.pair.w[i] = Complex(scale * dec.vectors(i, j), 0.0);
    }
    cand.stationarity_residual =
        stationarity_residual(stats, 1.0, cand.pair.mu, cand.pair.w);
    cand.norm_residual = std::abs(
        linalg::bilinear_dot(cand.pair.w, cand.pair.w) - Complex(k, 0.0));
    cand.secular_residual = cand.norm_residual;
    cand.kind = SolutionKind::kReal;
    cand.accepted = true;
    out.push_back(std::move(cand));
  }
  return out;
}

CandidateSolution solve_lambda_zero(const data::AssetStats& stats,
                                    const SolverConfig& cfg) {
  cfg.validate();
  const double r_norm = linalg::norm2(stats.r);
  if (r_norm == 0.0) {
    throw DegenerateObjectiveError(
        "solve_lambda_zero: r = 0, the return objective has no maximizer");
  }
  const double k = cfg.norm_budget();
  const std::size_t n = stats.size();

  CandidateSolution cand;
  cand.lambda = 0.0;
  cand.pair.mu = Complex(-0.5 * r_norm / std::sqrt(k), 0.0);
  cand.pair.w.resize(n);
  const double scale = std::sqrt(k) / r_norm;
  for (std::size_t i = 0; i < n; ++i) {
    cand.pair.w[i] = Complex(scale * stats.r[i], 0.0);
  }
  cand.stationarity_residual =
      stationarity_residual(stats, 0.0, cand.pair.mu, cand.pair.w);
  cand.norm_residual = std::abs(
      linalg::bilinear_dot(cand.pair.w, cand.pair.w) - Complex(k, 0.0));
  cand.secular_residual = cand.norm_residual;
  cand.kind = SolutionKind::kReal;
  cand.accepted = true;
  return cand;
}

}  // namespace marginopt::solver
