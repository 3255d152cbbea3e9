#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace argpipe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& reason)
      : Error("malformed record at line " + std::to_string(line) + ": " + reason), line(line) {}
  std::size_t line;
};

class DuplicateCaseId : public Error {
 public:
  explicit DuplicateCaseId(const std::string& id)
      : Error("duplicate case_id: " + id), case_id(id) {}
  std::string case_id;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus contains no documents") {}
};

class CorpusTooSmall : public Error {
 public:
  explicit CorpusTooSmall(std::size_t size)
      : Error("corpus of " + std::to_string(size) + " documents is too small to split") {}
};

class ProviderFailure : public Error {
 public:
  explicit ProviderFailure(const std::string& cause) : Error("provider failure: " + cause) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class NonSquareMatrix : public Error {
 public:
  NonSquareMatrix() : Error("matrix is not square") {}
};

class InvalidTargetCount : public Error {
 public:
  InvalidTargetCount(std::size_t target, std::size_t n)
      : Error("target segment count " + std::to_string(target) + " outside [1, " +
              std::to_string(n) + "]") {}
};

class SpanOutOfRange : public Error {
 public:
  SpanOutOfRange() : Error("segment span lies outside the document") {}
};

class SingleClassTrainingSet : public Error {
 public:
  SingleClassTrainingSet() : Error("training set contains only one class") {}
};

class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss() : Error("training loss became non-finite") {}
};

class EmptyTestSet : public Error {
 public:
  EmptyTestSet() : Error("evaluation requires a non-empty test set") {}
};

class EmptyText : public Error {
 public:
  EmptyText() : Error("text is empty after trimming") {}
};

class LabelSegmentMismatch : public Error {
 public:
  LabelSegmentMismatch(std::size_t labels, std::size_t segments)
      : Error("label count " + std::to_string(labels) + " does not cover " +
              std::to_string(segments) + " segments") {}
};

class NoArgumentativeSegments : public Error {
 public:
  explicit NoArgumentativeSegments(const std::string& doc_id)
      : Error("no argumentative segments in document " + doc_id) {}
};

class RequestTooLarge : public Error {
 public:
  RequestTooLarge(std::size_t prompt_tokens, std::size_t limit)
      : Error("prompt of " + std::to_string(prompt_tokens) + " tokens exceeds provider limit of " +
              std::to_string(limit) + " (budget misconfiguration)") {}
};

class UnknownProfile : public Error {
 public:
  explicit UnknownProfile(const std::string& name) : Error("unknown pricing profile: " + name) {}
};

class EmptyReference : public Error {
 public:
  EmptyReference() : Error("reference summary is empty") {}
};

class EmptyRows : public Error {
 public:
  EmptyRows() : Error("cannot render a table with no rows") {}
};

// CLI usage problems map to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace argpipe
