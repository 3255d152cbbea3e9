#include "argpipe/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "argpipe/errors.hpp"
#include "argpipe/tokenizer.hpp"
#include "metric_oracles.hpp"

using namespace argpipe;

namespace {

TokenSeq seq(const std::string& text) { return tokenize(text); }

TokenSeq random_seq(std::mt19937_64& rng, std::size_t max_len, std::size_t vocab) {
  const std::size_t len = rng() % (max_len + 1);
  TokenSeq tokens;
  for (std::size_t i = 0; i < len; ++i) tokens.push_back("w" + std::to_string(rng() % vocab));
  return tokens;
}

// Token embeddings fixed per token; used to pin BERTScore cases.
class TableProvider final : public EmbeddingProvider {
 public:
  explicit TableProvider(std::map<std::string, EmbeddingVector> table)
      : table_(std::move(table)) {}
  std::string name() const override { return "table"; }
  std::size_t dimension() const override { return table_.begin()->second.size(); }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& sentences) override {
    std::vector<EmbeddingVector> out;
    for (const std::string& s : sentences) out.push_back(table_.at(s));
    return out;
  }

 private:
  std::map<std::string, EmbeddingVector> table_;
};

}  // namespace

TEST_CASE("rouge-n basics and the clipped 5/6 case") {
  const TokenSeq same = seq("the court allowed the appeal");
  const Prf identity = rouge_n(same, same, 1);
  CHECK(identity.precision == doctest::Approx(1.0));
  CHECK(identity.recall == doctest::Approx(1.0));
  CHECK(identity.f1 == doctest::Approx(1.0));

  const Prf overlap = rouge_n(seq("the cat sat on the mat"), seq("the cat is on the mat"), 1);
  CHECK(overlap.precision == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(overlap.recall == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(overlap.f1 == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  const Prf disjoint = rouge_n(seq("alpha beta"), seq("gamma delta"), 1);
  CHECK(disjoint.f1 == 0.0);

  CHECK(rouge_n(seq("a b"), seq("a b c"), 3).f1 == 0.0);  // candidate too short for 3-grams
}

TEST_CASE("rouge-l lcs cases") {
  const TokenSeq same = seq("a b c d");
  CHECK(rouge_l(same, same).f1 == doctest::Approx(1.0));

  const Prf crossed = rouge_l(seq("a b c d"), seq("a c b d"));
  CHECK(crossed.f1 == doctest::Approx(0.75).epsilon(1e-12));

  CHECK(rouge_l({}, seq("a b")).f1 == 0.0);
  CHECK(rouge_l({}, seq("a b")).precision == 0.0);
}

TEST_CASE("rouge-l equals the exhaustive subsequence search on short pairs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const TokenSeq a = random_seq(rng, 4, 3);
    const TokenSeq b = random_seq(rng, 4, 3);
    const Prf fast = rouge_l(a, b);
    const auto slow = metric_oracles::rouge_l(a, b);
    CHECK(fast.f1 == doctest::Approx(slow.f1).epsilon(1e-12));
  }
}

TEST_CASE("bleu hand cases") {
  const TokenSeq cand = seq("the court allowed the appeal");
  CHECK(bleu(cand, {cand}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bleu(seq("a b"), {seq("a b")}) == doctest::Approx(1.0).epsilon(1e-12));  // short self-match

  // Clipping zeroes the 2-gram precision: score 0 without smoothing.
  CHECK(bleu(seq("the the the the"), {seq("the cat")}) == 0.0);

  // Halved candidate with perfect precisions: brevity penalty e^{-1}.
  const TokenSeq reference = seq("w0 w1 w2 w3 w4 w5 w6 w7");
  const TokenSeq half = seq("w0 w1 w2 w3");
  CHECK(bleu(half, {reference}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  CHECK(bleu({}, {reference}) == 0.0);
}

TEST_CASE("corpus bleu pools counts over pairs") {
  const std::vector<std::pair<TokenSeq, std::vector<TokenSeq>>> pairs = {
      {seq("a b c d"), {seq("a b c d")}},
      {seq("e f g h"), {seq("e f g h")}},
  };
  CHECK(corpus_bleu(pairs) == doctest::Approx(1.0).epsilon(1e-12));

  // One perfect and one hopeless pair: pooled counts stay positive, so the
  // corpus score sits strictly between the two document scores.
  const std::vector<std::pair<TokenSeq, std::vector<TokenSeq>>> mixed = {
      {seq("a b c d e"), {seq("a b c d e")}},
      {seq("x y z w v"), {seq("p q r s t")}},
  };
  const double pooled = corpus_bleu(mixed);
  CHECK(pooled > 0.0);
  CHECK(pooled < 1.0);
}

TEST_CASE("meteor hand cases") {
  CHECK(meteor(seq("alpha beta"), seq("gamma delta")) == 0.0);

  // Identical three tokens: one chunk, penalty 0.5 * (1/3)^3.
  CHECK(meteor(seq("a b c"), seq("a b c")) ==
        doctest::Approx(1.0 - 1.0 / 54.0).epsilon(1e-12));

  // Swapped pair: two chunks of one token each.
  CHECK(meteor(seq("b a"), seq("a b")) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("meteor penalty strictly increases with chunk count at fixed matches") {
  const double one = meteor(seq("a b c d"), seq("a b c d"));    // 1 chunk
  const double two = meteor(seq("a b c d"), seq("c d a b"));    // 2 chunks
  const double three = meteor(seq("a b c d"), seq("d c a b")); // 3 chunks
  const double four = meteor(seq("a b c d"), seq("d a c b"));  // 4 chunks
  CHECK(one > two);
  CHECK(two > three);
  CHECK(three > four);
}

TEST_CASE("meteor matches the exhaustive alignment search on short pairs") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const TokenSeq a = random_seq(rng, 6, 4);
    const TokenSeq b = random_seq(rng, 6, 4);
    CHECK(meteor(a, b) == doctest::Approx(metric_oracles::meteor(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("bert score greedy matching") {
  TableProvider provider({
      {"u", {1.0, 0.0}},
      {"v", {0.0, 1.0}},
  });

  // Identical sequences pin the score at 1 for any deterministic provider.
  const Prf same = bert_score({"u", "v"}, {"u", "v"}, provider);
  CHECK(same.f1 == doctest::Approx(1.0).epsilon(1e-12));

  // Orthogonal one-token sequences score 0.
  const Prf orthogonal = bert_score({"u"}, {"v"}, provider);
  CHECK(orthogonal.f1 == doctest::Approx(0.0));

  // cand {u}, ref {u, v}: recall (1 + 0)/2, precision 1, F1 2/3.
  const Prf partial = bert_score({"u"}, {"u", "v"}, provider);
  CHECK(partial.recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(partial.precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(partial.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Token-mode hashed embeddings keep stopword and punctuation tokens nonzero,
  // so identical sequences pin at 1 here too.
  HashedBowProvider hashed(64, /*filter_tokens=*/false);
  const TokenSeq tokens = seq("the appeal is allowed.");
  CHECK(bert_score(tokens, tokens, hashed).f1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("metric outputs stay in range on random sequences") {
  std::mt19937_64 rng(67);
  HashedBowProvider provider(32, /*filter_tokens=*/false);
  for (int trial = 0; trial < 150; ++trial) {
    const TokenSeq a = random_seq(rng, 12, 6);
    const TokenSeq b = random_seq(rng, 12, 6);
    for (const Prf& prf : {rouge_n(a, b, 1), rouge_n(a, b, 2), rouge_l(a, b)}) {
      CHECK(prf.precision >= 0.0);
      CHECK(prf.precision <= 1.0);
      CHECK(prf.recall >= 0.0);
      CHECK(prf.recall <= 1.0);
      CHECK(prf.f1 >= 0.0);
      CHECK(prf.f1 <= 1.0);
    }
    const double b_score = bleu(a, {b});
    CHECK(b_score >= 0.0);
    CHECK(b_score <= 1.0);
    const double m_score = meteor(a, b);
    CHECK(m_score >= 0.0);
    CHECK(m_score < 1.0);
    if (!a.empty() && !b.empty()) {
      const Prf bert = bert_score(a, b, provider);
      CHECK(bert.f1 >= 0.0);
      CHECK(bert.f1 <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("rouge-n and bleu are invariant under vocabulary renaming") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    const TokenSeq a = random_seq(rng, 10, 5);
    const TokenSeq b = random_seq(rng, 10, 5);
    auto rename = [](const TokenSeq& tokens) {
      TokenSeq out;
      for (const std::string& t : tokens) out.push_back("renamed_" + t + "_x");
      return out;
    };
    const TokenSeq ra = rename(a);
    const TokenSeq rb = rename(b);
    CHECK(rouge_n(a, b, 1).f1 == doctest::Approx(rouge_n(ra, rb, 1).f1).epsilon(1e-12));
    CHECK(rouge_n(a, b, 2).f1 == doctest::Approx(rouge_n(ra, rb, 2).f1).epsilon(1e-12));
    CHECK(bleu(a, {b}) == doctest::Approx(bleu(ra, {rb})).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_pair composes the full report") {
  const std::string reference = "The appeal is allowed with costs.";

  const EvalReport identity = evaluate_pair(reference, reference);
  CHECK(identity.rouge1.f1 == doctest::Approx(1.0));
  CHECK(identity.rouge2.f1 == doctest::Approx(1.0));
  CHECK(identity.rougeL.f1 == doctest::Approx(1.0));
  CHECK(identity.bleu == doctest::Approx(1.0));
  // Identical 7-token sequences: penalty 0.5/343.
  CHECK(identity.meteor == doctest::Approx(1.0 - 0.5 / 343.0).epsilon(1e-12));
  CHECK(identity.candidate_length == 7);

  CHECK_THROWS_AS(evaluate_pair("candidate", "   "), EmptyReference);
}

TEST_CASE("evaluate_pair agrees with the independent implementations at 1e-9") {
  const std::string candidate = "the fine was unfit so the appeal is allowed";
  const std::string reference = "the appeal is allowed because the fine was unfit";
  const EvalReport report = evaluate_pair(candidate, reference);

  const TokenSeq cand = seq(candidate);
  const TokenSeq ref = seq(reference);
  CHECK(report.rouge1.f1 ==
        doctest::Approx(metric_oracles::rouge_n(cand, ref, 1).f1).epsilon(1e-9));
  CHECK(report.rouge2.f1 ==
        doctest::Approx(metric_oracles::rouge_n(cand, ref, 2).f1).epsilon(1e-9));
  CHECK(report.rougeL.f1 == doctest::Approx(metric_oracles::rouge_l(cand, ref).f1).epsilon(1e-9));
  CHECK(report.bleu == doctest::Approx(metric_oracles::bleu(cand, ref)).epsilon(1e-9));
  CHECK(report.meteor == doctest::Approx(metric_oracles::meteor(cand, ref)).epsilon(1e-9));
}

TEST_CASE("aggregate reporting averages each metric") {
  EvalReport a;
  a.rouge1.f1 = 0.4;
  a.bleu = 0.2;
  a.meteor = 0.1;
  a.candidate_length = 100;
  EvalReport b;
  b.rouge1.f1 = 0.6;
  b.bleu = 0.4;
  b.meteor = 0.3;
  b.candidate_length = 200;

  const std::vector<EvalReport> reports{a, b};
  const EvalReport mean = average_reports(reports);
  CHECK(mean.rouge1.f1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mean.bleu == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(mean.meteor == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(mean.candidate_length == 150);
}
