// Benchmark comparing the OpenMP kernels against their serial references:
// the risk-aversion sweep (independent eigenproblems per grid point) and the
// orthant enumeration (independent KKT solves per sign pattern).

#include <chrono>
#include <cstdio>
#include <sstream>

#include "marginopt/frontier.hpp"
#include "marginopt/io.hpp"
#include "marginopt/market_data.hpp"
#include "marginopt/orthant.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace marginopt;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t assets = 12;
  std::size_t steps = 1000;
  std::size_t orthant_n = 14;
  if (argc > 1) assets = std::stoul(argv[1]);
  if (argc > 2) steps = std::stoul(argv[2]);
  if (argc > 3) orthant_n = std::stoul(argv[3]);

#ifdef _OPENMP
  std::printf("OpenMP: %d threads\n", omp_get_max_threads());
#else
  std::printf("OpenMP: not enabled (serial fallback)\n");
#endif

  std::istringstream csv(io::synthetic_prices_csv(assets, 301, 7));
  const auto stats =
      data::estimate_stats(data::compute_returns(data::load_prices(csv)));

  solver::SolverConfig cfg;
  cfg.lambda_steps = steps;

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = frontier::sweep_serial(stats, cfg);
  auto t1 = std::chrono::steady_clock::now();
  const auto parallel = frontier::sweep(stats, cfg);
  auto t2 = std::chrono::steady_clock::now();

  const double sweep_serial_s = seconds(t0, t1);
  const double sweep_parallel_s = seconds(t1, t2);
  std::printf("sweep       N=%zu T=%zu: serial %.3fs, parallel %.3fs (x%.2f)"
              " [%zu records]\n",
              assets, steps, sweep_serial_s, sweep_parallel_s,
              sweep_serial_s / sweep_parallel_s, serial.records.size());
  if (serial.records.size() != parallel.records.size()) {
    std::printf("MISMATCH: serial and parallel record counts differ\n");
    return 1;
  }

  const auto inst = orthant::random_instance(orthant_n, 99);
  t0 = std::chrono::steady_clock::now();
  const auto ser = orthant::enumerate_orthants_serial(inst, 0.5, 1.0, 1.0);
  t1 = std::chrono::steady_clock::now();
  const auto par = orthant::enumerate_orthants(inst, 0.5, 1.0, 1.0);
  t2 = std::chrono::steady_clock::now();

  const double enum_serial_s = seconds(t0, t1);
  const double enum_parallel_s = seconds(t1, t2);
  std::printf("enumeration N=%zu (2^N=%zu): serial %.3fs, parallel %.3fs "
              "(x%.2f) [%zu optima]\n",
              orthant_n, std::size_t{1} << orthant_n, enum_serial_s,
              enum_parallel_s, enum_serial_s / enum_parallel_s, ser.size());
  if (ser.size() != par.size()) {
    std::printf("MISMATCH: serial and parallel optima counts differ\n");
    return 1;
  }
  return 0;
}
