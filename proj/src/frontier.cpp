#include "marginopt/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "marginopt/errors.hpp"

namespace marginopt::frontier {

namespace {

using solver::CandidateSolution;
using solver::SolutionKind;
using solver::SolverConfig;

// Records produced at one grid point plus its share of the diagnostics.
struct GridPointResult {
  std::vector<PortfolioRecord> records;
  std::size_t candidates = 0;
  std::size_t accepted_real = 0;
  std::size_t accepted_complex = 0;
  std::size_t spurious = 0;
  bool interior = false;
  bool empty = false;
};

PortfolioRecord record_from_real(const RealVector& w,
                                 const data::AssetStats& stats,
                                 const CandidateSolution& cand,
                                 RecordKind kind) {
  PortfolioRecord rec = evaluate_real(w, stats);
  rec.lambda = cand.lambda;
  rec.mu = cand.pair.mu;
  rec.kind = kind;
  rec.stationarity_residual = cand.stationarity_residual;
  rec.norm_residual = cand.norm_residual;
  return rec;
}

GridPointResult solve_grid_point(const data::AssetStats& stats,
                                 std::size_t t, const SolverConfig& cfg) {
  const std::size_t steps = cfg.lambda_steps;
  GridPointResult out;

  if (t == 0) {
    const CandidateSolution cand = solver::solve_lambda_zero(stats, cfg);
    out.candidates = 1;
    out.accepted_real = 1;
    RealVector w(stats.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = cand.pair.w[i].real();
    out.records.push_back(record_from_real(w, stats, cand, RecordKind::kReal));
    return out;
  }
  if (t == steps) {
    const auto cands = solver::solve_lambda_one(stats, cfg);
    out.candidates = cands.size();
    out.accepted_real = cands.size();
    for (const auto& cand : cands) {
      RealVector w(stats.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = cand.pair.w[i].real();
      out.records.push_back(record_from_real(w, stats, cand, RecordKind::kReal));
    }
    return out;
  }

  const double lambda =
      static_cast<double>(t) / static_cast<double>(steps);
  const auto cands = solver::solve_lambda(stats, lambda, cfg);
  out.interior = true;
  out.candidates = cands.size();
  for (const auto& cand : cands) {
    if (!cand.accepted) {
      ++out.spurious;
      continue;
    }
    if (cand.kind == SolutionKind::kReal) {
      ++out.accepted_real;
      RealVector w(stats.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = cand.pair.w[i].real();
      out.records.push_back(record_from_real(w, stats, cand, RecordKind::kReal));
    } else {
      ++out.accepted_complex;
      // Conjugate twins carry the same information; keep Im(mu) > 0.
      if (cand.pair.mu.imag() <= 0.0) continue;
      for (PortfolioRecord rec : decompose_complex(cand.pair.w, stats)) {
        rec.lambda = cand.lambda;
        rec.mu = cand.pair.mu;
        rec.stationarity_residual = cand.stationarity_residual;
        rec.norm_residual = cand.norm_residual;
        out.records.push_back(std::move(rec));
      }
    }
  }
  out.empty = out.records.empty();
  return out;
}

std::optional<std::size_t> rank_max_sharpe(
    const std::vector<PortfolioRecord>& records, bool include_complex_parts) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PortfolioRecord& rec = records[i];
    if (!(rec.risk > 0.0)) continue;
    if (!include_complex_parts && rec.kind != RecordKind::kReal) continue;
    if (!best) {
      best = i;
      continue;
    }
    const PortfolioRecord& cur = records[*best];
    if (rec.sharpe > cur.sharpe) {
      best = i;
    } else if (rec.sharpe == cur.sharpe) {
      if (rec.lambda < cur.lambda ||
          (rec.lambda == cur.lambda && rec.risk < cur.risk)) {
        best = i;
      }
    }
  }
  return best;
}

FrontierSet run_sweep(const data::AssetStats& stats, const SolverConfig& cfg,
                      bool parallel) {
  cfg.validate();
  const std::size_t steps = cfg.lambda_steps;
  const std::size_t points = steps + 1;

  std::vector<GridPointResult> slots(points);
  std::vector<std::string> failures(points);

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < static_cast<long long>(points); ++t) {
      try {
        slots[static_cast<std::size_t>(t)] =
            solve_grid_point(stats, static_cast<std::size_t>(t), cfg);
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(t)] = e.what();
      }
    }
  } else {
    for (std::size_t t = 0; t < points; ++t) {
      try {
        slots[t] = solve_grid_point(stats, t, cfg);
      } catch (const std::exception& e) {
        failures[t] = e.what();
      }
    }
  }

  for (std::size_t t = 0; t < points; ++t) {
    if (!failures[t].empty()) {
      const double lambda =
          static_cast<double>(t) / static_cast<double>(steps);
      throw Error("sweep failed at lambda=" + std::to_string(lambda) + ": " +
                  failures[t]);
    }
  }

  FrontierSet fs;
  fs.sharpe_includes_complex_parts = cfg.sharpe_include_complex_parts;
  fs.stats_fingerprint = data::fingerprint(stats);
  fs.lambda_grid.resize(points);
  for (std::size_t t = 0; t < points; ++t) {
    fs.lambda_grid[t] = static_cast<double>(t) / static_cast<double>(steps);
  }

  for (std::size_t t = 0; t < points; ++t) {
    GridPointResult& slot = slots[t];
    if (slot.interior) {
      fs.diagnostics.interior_eigenvalues += slot.candidates;
    } else {
      fs.diagnostics.endpoint_candidates += slot.candidates;
    }
    fs.diagnostics.accepted_real += slot.accepted_real;
    fs.diagnostics.accepted_complex += slot.accepted_complex;
    fs.diagnostics.spurious += slot.spurious;
    if (slot.empty) {
      fs.diagnostics.lambdas_without_solutions.push_back(fs.lambda_grid[t]);
    }
    for (auto& rec : slot.records) fs.records.push_back(std::move(rec));
  }

  std::stable_sort(fs.records.begin(), fs.records.end(),
                   [](const PortfolioRecord& a, const PortfolioRecord& b) {
                     if (a.lambda != b.lambda) return a.lambda < b.lambda;
                     if (a.mu.real() != b.mu.real()) {
                       return a.mu.real() < b.mu.real();
                     }
                     if (a.kind != b.kind) {
                       return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                     }
                     if (a.mu.imag() != b.mu.imag()) {
                       return a.mu.imag() < b.mu.imag();
                     }
                     return a.risk < b.risk;
                   });

  fs.max_sharpe_index =
      rank_max_sharpe(fs.records, fs.sharpe_includes_complex_parts);
  return fs;
}

}  // namespace

const char* record_kind_name(RecordKind kind) {
  switch (kind) {
    case RecordKind::kReal:
      return "real";
    case RecordKind::kRealPart:
      return "real-part";
    case RecordKind::kImagPart:
      return "imag-part";
  }
  return "?";
}

PortfolioRecord evaluate_real(const RealVector& w,
                              const data::AssetStats& stats) {
  if (w.size() != stats.size()) {
    throw DimensionError("evaluate_real: weight length mismatch");
  }
  PortfolioRecord rec;
  const double wr = linalg::dot(w, stats.r);
  rec.weights = w;
  if (wr < 0.0) {
    for (double& x : rec.weights) x = -x;
  }
  rec.ret = std::abs(wr);
  rec.risk = std::sqrt(std::max(0.0, linalg::dot(w, linalg::multiply(stats.S, w))));
  rec.sharpe = rec.risk > 0.0 ? rec.ret / rec.risk : 0.0;
  return rec;
}

std::vector<PortfolioRecord> decompose_complex(const ComplexVector& w,
                                               const data::AssetStats& stats) {
  if (w.size() != stats.size()) {
    throw DimensionError("decompose_complex: weight length mismatch");
  }
  const std::size_t n = w.size();
  RealVector re(n);
  RealVector im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = w[i].real();
    im[i] = w[i].imag();
  }
  const double total = linalg::norm2(w);
  const double skip_below = 1e-14 * total;

  std::vector<PortfolioRecord> out;
  if (linalg::norm2(re) > skip_below) {
    PortfolioRecord rec = evaluate_real(re, stats);
    rec.kind = RecordKind::kRealPart;
    out.push_back(std::move(rec));
  }
  if (linalg::norm2(im) > skip_below) {
    PortfolioRecord rec = evaluate_real(im, stats);
    rec.kind = RecordKind::kImagPart;
    out.push_back(std::move(rec));
  }
  return out;
}

FrontierSet sweep(const data::AssetStats& stats,
                  const solver::SolverConfig& cfg) {
  return run_sweep(stats, cfg, true);
}

FrontierSet sweep_serial(const data::AssetStats& stats,
                         const solver::SolverConfig& cfg) {
  return run_sweep(stats, cfg, false);
}

const PortfolioRecord& max_sharpe(const FrontierSet& fs) {
  const auto best =
      rank_max_sharpe(fs.records, fs.sharpe_includes_complex_parts);
  if (!best) {
    throw NoRankingError("max_sharpe: no record with positive risk");
  }
  return fs.records[*best];
}

std::vector<ClassicalPoint> classical_frontier(const data::AssetStats& stats,
                                               std::size_t n_points) {
  const std::size_t n = stats.size();
  if (n_points == 0) return {};
  const auto dec = linalg::sym_eig_decomposition(stats.S);
  if (!(dec.values.front() > 1e-10 * linalg::frobenius_norm(stats.S))) {
    throw ValidationError(
        "classical_frontier: covariance is not positive definite");
  }

  const RealVector ones(n, 1.0);
  linalg::RealLu lu(stats.S);
  const RealVector s_inv_ones = lu.solve(ones);
  const RealVector s_inv_r = lu.solve(stats.r);
  const double a = linalg::dot(ones, s_inv_ones);
  const double b = linalg::dot(ones, s_inv_r);
  const double c = linalg::dot(stats.r, s_inv_r);
  const double d = a * c - b * b;

  const double rho_lo = *std::min_element(stats.r.begin(), stats.r.end());
  const double rho_hi = *std::max_element(stats.r.begin(), stats.r.end());

  std::vector<ClassicalPoint> out;
  out.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double frac = n_points == 1
                            ? 0.0
                            : static_cast<double>(i) /
                                  static_cast<double>(n_points - 1);
    const double rho = rho_lo + (rho_hi - rho_lo) * frac;
    ClassicalPoint pt;
    pt.ret = rho;
    if (std::abs(d) > 1e-30) {
      pt.weights.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        pt.weights[j] =
            ((c - b * rho) * s_inv_ones[j] + (a * rho - b) * s_inv_r[j]) / d;
      }
    } else {
      // r parallel to 1: every feasible return equals b/a; the global
      // minimum-variance portfolio is the only frontier point.
      pt.weights.resize(n);
      for (std::size_t j = 0; j < n; ++j) pt.weights[j] = s_inv_ones[j] / a;
    }
    pt.risk = std::sqrt(std::max(
        0.0, linalg::dot(pt.weights, linalg::multiply(stats.S, pt.weights))));
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace marginopt::frontier
