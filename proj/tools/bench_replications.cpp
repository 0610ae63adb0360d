// Benchmark: Monte Carlo replications run serially (reference) vs on the
// OpenMP worker pool. Each replication owns its RNG stream and writes into
// its own slot, so both schedules must produce bit-identical results; the
// benchmark asserts that and reports the timings.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "karlin/geometry.hpp"
#include "karlin/process.hpp"
#include "karlin/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double replication_value(const karlin::process::ModelParams& params,
                         std::uint64_t n, std::uint64_t seed,
                         std::uint64_t rep) {
  karlin::RngStream rng(seed, rep);
  const auto path = karlin::process::simulate_path(params, n, rng);
  double max_x = 0.0;
  for (const double x : path.products) max_x = std::max(max_x, x);
  return max_x;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replication throughput: serial reference vs worker pool"};
  std::uint64_t reps = 256;
  std::uint64_t n = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  double alpha = 1.0, alpha_prime = 2.0, beta = 0.5;
  app.add_option("--reps", reps, "number of replications");
  app.add_option("--n", n, "path length per replication");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--threads", threads, "worker pool size (0 = max)");
  app.add_option("--alpha", alpha, "signal tail exponent");
  app.add_option("--alpha-prime", alpha_prime, "noise tail exponent");
  app.add_option("--beta", beta, "label-law memory parameter");
  CLI11_PARSE(app, argc, argv);

  const auto params =
      karlin::process::ModelParams::standard(alpha, alpha_prime, beta);

  int pool = threads;
#ifdef _OPENMP
  if (pool <= 0) pool = omp_get_max_threads();
#else
  pool = 1;
#endif

  std::vector<double> serial_out(reps), parallel_out(reps);

  auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t r = 0; r < reps; ++r) {
    serial_out[r] = replication_value(params, n, seed, r);
  }
  const double serial_s = elapsed_seconds(t0);

  t0 = std::chrono::steady_clock::now();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(pool)
#endif
  for (long long r = 0; r < static_cast<long long>(reps); ++r) {
    parallel_out[static_cast<std::uint64_t>(r)] =
        replication_value(params, n, seed, static_cast<std::uint64_t>(r));
  }
  const double parallel_s = elapsed_seconds(t0);

  bool identical = true;
  for (std::uint64_t r = 0; r < reps; ++r) {
    if (serial_out[r] != parallel_out[r]) {
      identical = false;
      std::cerr << "mismatch at rep " << r << ": " << serial_out[r]
                << " vs " << parallel_out[r] << '\n';
    }
  }

  std::cout.precision(4);
  std::cout << "reps=" << reps << " n=" << n << " threads=" << pool << '\n'
            << "serial_seconds=" << serial_s << '\n'
            << "parallel_seconds=" << parallel_s << '\n'
            << "speedup=" << (parallel_s > 0.0 ? serial_s / parallel_s : 0.0)
            << '\n'
            << "bit_identical=" << (identical ? "yes" : "no") << '\n';
  return identical ? 0 : 1;
}
