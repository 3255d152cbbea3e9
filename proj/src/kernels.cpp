#include "argpipe/kernels.hpp"

#include "argpipe/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace argpipe {

namespace {

void check_vectors(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) throw ProviderFailure("no vectors to compare");
  const std::size_t dim = vectors.front().size();
  for (const EmbeddingVector& v : vectors) {
    if (v.size() != dim) throw DimensionMismatch(dim, v.size());
  }
}

void check_mask(std::size_t mask_size) {
  if (mask_size < 3 || mask_size % 2 == 0) {
    throw Error("rank mask size must be odd and >= 3, got " + std::to_string(mask_size));
  }
}

inline void similarity_row(std::span<const EmbeddingVector> vectors, SquareMatrix& sim,
                           std::size_t i) {
  const std::size_t n = vectors.size();
  for (std::size_t j = i; j < n; ++j) {
    const double value = cosine(vectors[i], vectors[j]);
    sim(i, j) = value;
    sim(j, i) = value;
  }
}

inline double rank_cell(const SquareMatrix& sim, std::size_t n, std::size_t half, std::size_t i,
                        std::size_t j) {
  const std::size_t row_lo = i >= half ? i - half : 0;
  const std::size_t row_hi = std::min(n - 1, i + half);
  const std::size_t col_lo = j >= half ? j - half : 0;
  const std::size_t col_hi = std::min(n - 1, j + half);
  const double center = sim(i, j);
  std::size_t lower = 0;
  std::size_t neighbors = 0;
  for (std::size_t r = row_lo; r <= row_hi; ++r) {
    for (std::size_t c = col_lo; c <= col_hi; ++c) {
      if (r == i && c == j) continue;
      ++neighbors;
      if (sim(r, c) < center) ++lower;
    }
  }
  if (neighbors == 0) return 0.0;
  return static_cast<double>(lower) / static_cast<double>(neighbors);
}

}  // namespace

SquareMatrix similarity_matrix(std::span<const EmbeddingVector> vectors) {
  check_vectors(vectors);
  const std::size_t n = vectors.size();
  SquareMatrix sim(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    similarity_row(vectors, sim, static_cast<std::size_t>(i));
  }
  return sim;
}

SquareMatrix rank_matrix(const SquareMatrix& sim, std::size_t mask_size) {
  check_mask(mask_size);
  const std::size_t n = sim.size();
  if (n == 0) throw NonSquareMatrix();
  const std::size_t half = mask_size / 2;
  SquareMatrix rank(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rank(static_cast<std::size_t>(i), j) = rank_cell(sim, n, half, static_cast<std::size_t>(i), j);
    }
  }
  return rank;
}

namespace serial {

SquareMatrix similarity_matrix(std::span<const EmbeddingVector> vectors) {
  check_vectors(vectors);
  const std::size_t n = vectors.size();
  SquareMatrix sim(n);
  for (std::size_t i = 0; i < n; ++i) similarity_row(vectors, sim, i);
  return sim;
}

SquareMatrix rank_matrix(const SquareMatrix& sim, std::size_t mask_size) {
  check_mask(mask_size);
  const std::size_t n = sim.size();
  if (n == 0) throw NonSquareMatrix();
  const std::size_t half = mask_size / 2;
  SquareMatrix rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rank(i, j) = rank_cell(sim, n, half, i, j);
    }
  }
  return rank;
}

}  // namespace serial

}  // namespace argpipe
