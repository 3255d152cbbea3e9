// Compares the OpenMP kernels against their serial reference implementations
// on synthetic inputs and reports timings plus a correctness check.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "argpipe/kernels.hpp"
#include "argpipe/metrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<argpipe::EmbeddingVector> random_vectors(std::size_t n, std::size_t dim,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<argpipe::EmbeddingVector> vectors(n, argpipe::EmbeddingVector(dim));
  for (auto& v : vectors) {
    for (double& x : v) x = dist(rng);
  }
  return vectors;
}

argpipe::TokenSeq random_tokens(std::size_t len, std::mt19937_64& rng) {
  static const char* kWords[] = {"court", "appeal", "order", "costs",   "motion", "counsel",
                                 "claim", "issue",  "facts", "hearing", "notice", "ruling"};
  std::uniform_int_distribution<std::size_t> dist(0, 11);
  argpipe::TokenSeq tokens;
  for (std::size_t i = 0; i < len; ++i) tokens.push_back(kWords[dist(rng)]);
  return tokens;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serially\n\n");
#endif

  std::printf("%-28s %10s %10s %8s %8s\n", "kernel", "serial(s)", "parallel(s)", "speedup",
              "match");

  for (std::size_t n : {200, 400, 800}) {
    const auto vectors = random_vectors(n, 512, 17);

    auto t0 = Clock::now();
    const auto sim_serial = argpipe::serial::similarity_matrix(vectors);
    const double serial_sim = seconds_since(t0);

    t0 = Clock::now();
    const auto sim_parallel = argpipe::similarity_matrix(vectors);
    const double parallel_sim = seconds_since(t0);

    char name[64];
    std::snprintf(name, sizeof(name), "similarity n=%zu", n);
    std::printf("%-28s %10.3f %10.3f %8.2fx %8s\n", name, serial_sim, parallel_sim,
                serial_sim / parallel_sim, sim_serial == sim_parallel ? "yes" : "NO");

    t0 = Clock::now();
    const auto rank_serial = argpipe::serial::rank_matrix(sim_serial, 11);
    const double serial_rank = seconds_since(t0);

    t0 = Clock::now();
    const auto rank_parallel = argpipe::rank_matrix(sim_parallel, 11);
    const double parallel_rank = seconds_since(t0);

    std::snprintf(name, sizeof(name), "rank mask=11 n=%zu", n);
    std::printf("%-28s %10.3f %10.3f %8.2fx %8s\n", name, serial_rank, parallel_rank,
                serial_rank / parallel_rank, rank_serial == rank_parallel ? "yes" : "NO");
  }

  // Pair scoring throughput: ROUGE + METEOR over synthetic summary pairs.
  {
    std::mt19937_64 rng(23);
    std::vector<std::pair<argpipe::TokenSeq, argpipe::TokenSeq>> pairs;
    for (int i = 0; i < 200; ++i) {
      pairs.emplace_back(random_tokens(150, rng), random_tokens(120, rng));
    }

    auto t0 = Clock::now();
    double checksum_serial = 0.0;
    for (const auto& [cand, ref] : pairs) {
      checksum_serial += argpipe::rouge_l(cand, ref).f1 + argpipe::meteor(cand, ref);
    }
    const double serial_eval = seconds_since(t0);

    t0 = Clock::now();
    double checksum_parallel = 0.0;
#pragma omp parallel for reduction(+ : checksum_parallel) schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(pairs.size()); ++i) {
      const auto& [cand, ref] = pairs[static_cast<std::size_t>(i)];
      checksum_parallel += argpipe::rouge_l(cand, ref).f1 + argpipe::meteor(cand, ref);
    }
    const double parallel_eval = seconds_since(t0);

    std::printf("%-28s %10.3f %10.3f %8.2fx %8s\n", "pair scoring x200", serial_eval,
                parallel_eval, serial_eval / parallel_eval,
                std::abs(checksum_serial - checksum_parallel) < 1e-9 ? "yes" : "NO");
  }
  return 0;
}
