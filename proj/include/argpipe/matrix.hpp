#pragma once

#include <cstddef>
#include <vector>

namespace argpipe {

// Dense row-major square matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), cells_(n * n, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }

  std::size_t size() const { return n_; }

  bool operator==(const SquareMatrix& other) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> cells_;
};

}  // namespace argpipe
