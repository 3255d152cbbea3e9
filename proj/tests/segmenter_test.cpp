#include "argpipe/segmenter.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "argpipe/embedding.hpp"
#include "argpipe/errors.hpp"
#include "argpipe/kernels.hpp"
#include "test_support.hpp"

using namespace argpipe;

namespace {

std::vector<EmbeddingVector> random_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<EmbeddingVector> vectors(n, EmbeddingVector(dim));
  for (auto& v : vectors) {
    for (double& x : v) x = dist(rng);
  }
  return vectors;
}

}  // namespace

TEST_CASE("cosine basics") {
  const EmbeddingVector x = {1.0, 2.0, 3.0};
  CHECK(cosine(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.0));
  // 32 / (sqrt(14) * sqrt(77))
  CHECK(cosine({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}) ==
        doctest::Approx(0.974631846).epsilon(1e-9));
  CHECK(cosine({0.0, 0.0}, {1.0, 1.0}) == 0.0);  // zero vector compares as 0
  CHECK_THROWS_AS(cosine({1.0}, {1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("hashed provider is deterministic and respects shared terms") {
  HashedBowProvider provider(512);
  const auto vectors = provider.embed({"tax appeal", "tax appeal", "tax appeal court"});
  CHECK(vectors[0] == vectors[1]);

  // Two shared terms out of two and three: cosine stays clearly positive.
  const double similarity = cosine(vectors[0], vectors[2]);
  CHECK(similarity > 0.0);
  CHECK(similarity == doctest::Approx(2.0 / std::sqrt(2.0 * 3.0)).epsilon(1e-9));

  CHECK_THROWS_AS(provider.embed({}), ProviderFailure);
}

TEST_CASE("stopword-only sentences embed to zero and compare as zero") {
  HashedBowProvider provider(64);
  const auto vectors = provider.embed({"the and of", "tax appeal"});
  CHECK(cosine(vectors[0], vectors[1]) == 0.0);
  CHECK(cosine(vectors[0], vectors[0]) == 0.0);
}

TEST_CASE("rank matrix degenerate and hand-checked cases") {
  SquareMatrix one(1, 0.5);
  const SquareMatrix rank_one = rank_matrix(one, 3);
  CHECK(rank_one(0, 0) == 0.0);  // no neighbors

  // Strict maximum at (0, 1): all five clipped-window neighbors are lower.
  // The matrix is deliberately not symmetric; in a symmetric matrix the
  // mirror cell would tie, which the next check covers.
  SquareMatrix m(3, 0.0);
  m(0, 0) = 0.4;
  m(1, 1) = 0.4;
  m(2, 2) = 0.4;
  m(0, 1) = 0.9;
  m(1, 0) = 0.2;
  m(0, 2) = 0.1;
  m(2, 0) = 0.1;
  m(1, 2) = 0.2;
  m(2, 1) = 0.2;
  const SquareMatrix ranked = rank_matrix(m, 3);
  CHECK(ranked(0, 1) == doctest::Approx(1.0));

  // Symmetric variant: the strict-max pair sits at (0, 2)/(2, 0) of a 4x4 so
  // each window sees only one of the two; every neighbor is strictly lower.
  SquareMatrix sym(4, 0.1);
  for (std::size_t d = 0; d < 4; ++d) sym(d, d) = 0.4;
  sym(0, 2) = 0.9;
  sym(2, 0) = 0.9;
  const SquareMatrix sym_ranked = rank_matrix(sym, 3);
  CHECK(sym_ranked(0, 2) == doctest::Approx(1.0));
  CHECK(sym_ranked(2, 0) == doctest::Approx(1.0));

  SquareMatrix constant(5, 0.7);
  const SquareMatrix rank_constant = rank_matrix(constant, 11);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(rank_constant(i, j) == 0.0);
  }

  CHECK_THROWS_AS(rank_matrix(m, 4), Error);  // even mask
  CHECK_THROWS_AS(rank_matrix(m, 1), Error);
}

TEST_CASE("rank entries live in [0,1] and ranks ignore monotone rescaling") {
  const auto vectors = random_vectors(24, 32, 3);
  const SquareMatrix sim = similarity_matrix(vectors);
  const SquareMatrix ranked = rank_matrix(sim, 11);

  SquareMatrix rescaled(sim.size());
  for (std::size_t i = 0; i < sim.size(); ++i) {
    for (std::size_t j = 0; j < sim.size(); ++j) {
      const double v = sim(i, j);
      rescaled(i, j) = 2.0 * (v * v * v) + 5.0;  // strictly monotone on [-1, 1]
    }
  }
  const SquareMatrix ranked_rescaled = rank_matrix(rescaled, 11);

  for (std::size_t i = 0; i < sim.size(); ++i) {
    for (std::size_t j = 0; j < sim.size(); ++j) {
      CHECK(ranked(i, j) >= 0.0);
      CHECK(ranked(i, j) <= 1.0);
      CHECK(ranked(i, j) == ranked_rescaled(i, j));
    }
  }
}

TEST_CASE("parallel kernels match the serial reference exactly") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto vectors = random_vectors(37, 48, seed);
    const SquareMatrix sim_parallel = similarity_matrix(vectors);
    const SquareMatrix sim_serial = serial::similarity_matrix(vectors);
    CHECK(sim_parallel == sim_serial);

    const SquareMatrix rank_parallel = rank_matrix(sim_parallel, 7);
    const SquareMatrix rank_serial = serial::rank_matrix(sim_serial, 7);
    CHECK(rank_parallel == rank_serial);
  }
}

TEST_CASE("similarity matrix is symmetric with a row-maximal unit diagonal") {
  const auto vectors = random_vectors(12, 16, 5);
  const SquareMatrix sim = similarity_matrix(vectors);
  for (std::size_t i = 0; i < sim.size(); ++i) {
    CHECK(sim(i, i) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < sim.size(); ++j) {
      CHECK(sim(i, j) == sim(j, i));
      CHECK(sim(i, i) >= sim(i, j) - 1e-12);
    }
  }
}

TEST_CASE("rank transform of a symmetric matrix is symmetric") {
  for (std::uint64_t seed : {13ULL, 14ULL}) {
    const auto vectors = random_vectors(20, 24, seed);
    const SquareMatrix ranked = rank_matrix(similarity_matrix(vectors), 5);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      for (std::size_t j = 0; j < ranked.size(); ++j) {
        CHECK(ranked(i, j) == ranked(j, i));
      }
    }
  }
}

TEST_CASE("c99 trivial segment counts") {
  const auto vectors = random_vectors(9, 16, 11);
  const SquareMatrix ranked = rank_matrix(similarity_matrix(vectors), 11);

  C99Params one;
  one.target_segments = 1;
  const Segmentation single = c99_segment(ranked, one);
  CHECK(single.boundaries.empty());
  CHECK(single.spans().size() == 1);
  CHECK(single.spans()[0] == SentenceSpan{0, 9});

  C99Params all;
  all.target_segments = 9;
  const Segmentation saturated = c99_segment(ranked, all);
  CHECK(saturated.segment_count() == 9);
  for (const SentenceSpan& span : saturated.spans()) CHECK(span.length() == 1);

  C99Params bad;
  bad.target_segments = 10;
  CHECK_THROWS_AS(c99_segment(ranked, bad), InvalidTargetCount);
}

TEST_CASE("c99 recovers the split of a block rank matrix, checked exhaustively") {
  // Two dense 5x5 blocks.
  SquareMatrix ranked(10);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      const bool same_block = (i < 5) == (j < 5);
      ranked(i, j) = same_block ? 0.9 : 0.1;
    }
  }

  // Oracle: score all nine candidate boundaries directly from the definition.
  double best_density = -1.0;
  std::size_t best_boundary = 0;
  for (std::size_t b = 1; b < 10; ++b) {
    double mass = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 10; ++j) {
        const bool inside = (i < b && j < b) || (i >= b && j >= b);
        if (inside) mass += ranked(i, j);
      }
    }
    const double area = static_cast<double>(b * b + (10 - b) * (10 - b));
    const double density = mass / area;
    if (density > best_density) {
      best_density = density;
      best_boundary = b;
    }
  }
  CHECK(best_boundary == 5);

  C99Params params;
  params.target_segments = 2;
  const Segmentation segmentation = c99_segment(ranked, params);
  REQUIRE(segmentation.boundaries.size() == 1);
  CHECK(segmentation.boundaries[0] == best_boundary);
}

TEST_CASE("one-sentence document segments into one span") {
  CaseDocument doc;
  doc.case_id = "single";
  doc.sentences.push_back({0, "The appeal is dismissed.", std::nullopt});
  HashedBowProvider provider(128);
  const Segmentation segmentation = segment_document(doc, provider, C99Params{});
  CHECK(segmentation.segment_count() == 1);
  CHECK(segmentation.sentence_count == 1);
}

TEST_CASE("two-topic documents split near the topic boundary under auto termination") {
  HashedBowProvider provider(512);
  const CaseDocument doc = test_support::two_topic_document(99);
  C99Trace trace;
  const Segmentation segmentation = segment_document(doc, provider, C99Params{}, &trace);

  bool near_boundary = false;
  for (std::size_t b : segmentation.boundaries) {
    if (b >= 9 && b <= 11) near_boundary = true;
  }
  CHECK(near_boundary);

  // Greedy densities never decrease along the recorded trajectory.
  for (std::size_t k = 1; k < trace.densities.size(); ++k) {
    CHECK(trace.densities[k] >= trace.densities[k - 1] - 1e-12);
  }
}

TEST_CASE("segmentation spans partition the document for random inputs") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 1 + static_cast<std::size_t>(seed * 7 % 40);
    const auto vectors = random_vectors(n, 24, seed + 100);
    const SquareMatrix ranked = rank_matrix(similarity_matrix(vectors), 11);

    C99Trace trace;
    const Segmentation segmentation = c99_segment(ranked, C99Params{}, &trace);
    const auto spans = segmentation.spans();
    REQUIRE_FALSE(spans.empty());
    CHECK(spans.front().begin == 0);
    CHECK(spans.back().end == n);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      CHECK(spans[i].begin < spans[i].end);
      if (i > 0) CHECK(spans[i].begin == spans[i - 1].end);
    }
    for (std::size_t k = 1; k < trace.densities.size(); ++k) {
      CHECK(trace.densities[k] >= trace.densities[k - 1] - 1e-12);
    }
  }
}

TEST_CASE("segmentation is deterministic for identical inputs") {
  HashedBowProvider provider(256);
  const CaseDocument doc = test_support::two_topic_document(7);
  const Segmentation a = segment_document(doc, provider, C99Params{});
  const Segmentation b = segment_document(doc, provider, C99Params{});
  CHECK(a.boundaries == b.boundaries);
}
