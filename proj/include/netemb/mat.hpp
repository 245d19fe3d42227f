#pragma once

#include <cstddef>
#include <vector>

#include "netemb/error.hpp"

namespace netemb {

// Plain dense row-major matrix of doubles. Graph-derived matrices and oracle
// inputs use this; differentiable computation uses Tensor instead.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }

  bool square() const { return rows == cols; }

  bool symmetric(double tol = 0.0) const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = i + 1; j < cols; ++j) {
        double d = (*this)(i, j) - (*this)(j, i);
        if (d < -tol || d > tol) return false;
      }
    return true;
  }

  std::vector<double> row(std::size_t i) const {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(i * cols),
                               v.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
  }
};

inline Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw ShapeError("mat matmul: inner dimensions differ");
  Mat out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

}  // namespace netemb
