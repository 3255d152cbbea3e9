#pragma once

#include <span>

#include "argpipe/embedding.hpp"
#include "argpipe/matrix.hpp"

namespace argpipe {

// Pairwise cosine similarity of sentence vectors. Symmetric; each cell is
// computed once and mirrored, so the parallel and serial variants are
// bitwise identical.
SquareMatrix similarity_matrix(std::span<const EmbeddingVector> vectors);

// Rank transform: each cell becomes the fraction of its neighbors, inside a
// mask_size x mask_size window clipped at the borders, whose similarity is
// strictly lower. mask_size must be odd and >= 3. A cell with no neighbors
// ranks 0.
SquareMatrix rank_matrix(const SquareMatrix& sim, std::size_t mask_size = 11);

// Serial reference implementations kept for testing and benchmarking; the
// OpenMP kernels above must match them exactly.
namespace serial {
SquareMatrix similarity_matrix(std::span<const EmbeddingVector> vectors);
SquareMatrix rank_matrix(const SquareMatrix& sim, std::size_t mask_size = 11);
}  // namespace serial

}  // namespace argpipe
