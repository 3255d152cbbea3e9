#include "argpipe/cli.hpp"

#include <doctest.h>

#include <filesystem>

#include "test_support.hpp"

using namespace argpipe;
namespace fs = std::filesystem;

TEST_CASE("stats on the fixture corpus exits cleanly") {
  CHECK(run_cli({"stats", test_support::fixture("tiny.jsonl")}) == 0);
  CHECK(run_cli({"--json", "stats", test_support::fixture("tiny.jsonl")}) == 0);
}

TEST_CASE("unknown subcommands and missing arguments exit with code 2") {
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"score"}) == 2);  // required options missing
}

TEST_CASE("runtime failures exit with code 1") {
  CHECK(run_cli({"stats", "/nonexistent/corpus.jsonl"}) == 1);
}

TEST_CASE("split writes three parts plus a manifest") {
  test_support::TempDir dir("cli_split");
  CHECK(run_cli({"--out-dir", dir.str(), "split", test_support::fixture("tiny.jsonl"), "--seed",
                 "5", "--out", "parts"}) == 0);
  CHECK(fs::exists(dir.path() / "parts" / "train.jsonl"));
  CHECK(fs::exists(dir.path() / "parts" / "validation.jsonl"));
  CHECK(fs::exists(dir.path() / "parts" / "test.jsonl"));
  CHECK(fs::exists(dir.path() / "parts" / "split.json"));
}

TEST_CASE("segment then label then summarize then score round-trips via files") {
  test_support::TempDir dir("cli_pipe");
  const std::string corpus = test_support::fixture("tiny.jsonl");

  CHECK(run_cli({"--out-dir", dir.str(), "segment", corpus, "--out", "segments.jsonl"}) == 0);
  CHECK(fs::exists(dir.path() / "segments.jsonl"));

  CHECK(run_cli({"--out-dir", dir.str(), "label", corpus, "--gold", "--segments-file",
                 (dir.path() / "segments.jsonl").string(), "--out", "labels.jsonl"}) == 0);

  CHECK(run_cli({"--out-dir", dir.str(), "summarize", corpus, "--method", "argseg",
                 "--segments-file", (dir.path() / "segments.jsonl").string(), "--labels-file",
                 (dir.path() / "labels.jsonl").string(), "--max-tokens", "24", "--out",
                 "summaries.jsonl"}) == 0);
  CHECK(fs::exists(dir.path() / "summaries.jsonl"));

  CHECK(run_cli({"--out-dir", dir.str(), "score", "--candidates",
                 (dir.path() / "summaries.jsonl").string(), "--references", corpus, "--out",
                 "report.json"}) == 0);
  CHECK(fs::exists(dir.path() / "report.json"));

  const std::string report = test_support::read_file(dir.path() / "report.json");
  CHECK(report.find("rouge1") != std::string::npos);
  CHECK(report.find("average") != std::string::npos);
}

TEST_CASE("train, predict, and eval-classifier work end to end") {
  test_support::TempDir dir("cli_train");
  const std::string corpus = test_support::fixture("tiny.jsonl");

  CHECK(run_cli({"--out-dir", dir.str(), "train", corpus, "--epochs", "50", "--lr", "0.5",
                 "--seed", "3", "--model-out", "model.json"}) == 0);
  CHECK(fs::exists(dir.path() / "model.json"));

  CHECK(run_cli({"--out-dir", dir.str(), "predict", corpus, "--model",
                 (dir.path() / "model.json").string(), "--out", "predictions.jsonl"}) == 0);
  CHECK(fs::exists(dir.path() / "predictions.jsonl"));

  CHECK(run_cli({"--out-dir", dir.str(), "eval-classifier", corpus, "--predictions",
                 (dir.path() / "predictions.jsonl").string()}) == 0);
}

TEST_CASE("the full experiment pipeline is deterministic across runs") {
  const std::string corpus = test_support::fixture("tiny.jsonl");

  auto run_pipeline = [&corpus](const test_support::TempDir& dir) {
    const auto config_path = dir.path() / "exp.conf";
    test_support::write_file(config_path,
                             "corpus = " + corpus +
                                 "\n"
                                 "methods = argseg, baseline\n"
                                 "temperatures = 0, 0.3\n"
                                 "max_tokens = 24, 48\n"
                                 "provider = mock\n"
                                 "embedding_dim = 128\n"
                                 "out = exp_out\n");
    REQUIRE(run_cli({"--out-dir", dir.str(), "experiment", "--config",
                     config_path.string()}) == 0);
    return test_support::read_file(dir.path() / "exp_out" / "report.md");
  };

  test_support::TempDir dir_a("cli_exp_a");
  test_support::TempDir dir_b("cli_exp_b");
  const std::string report_a = run_pipeline(dir_a);
  const std::string report_b = run_pipeline(dir_b);
  REQUIRE_FALSE(report_a.empty());
  CHECK(report_a == report_b);  // byte-identical reports
  CHECK(fs::exists(dir_a.path() / "exp_out" / "report.csv"));
  CHECK(fs::exists(dir_a.path() / "exp_out" / "results"));
}
