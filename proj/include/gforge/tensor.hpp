#pragma once

#include <cstddef>
#include <vector>

namespace gforge {

// Dense rank-4 tensor, row-major, all four extents equal.
struct Tensor4 {
  int n = 0;
  std::vector<double> data;

  Tensor4() = default;
  explicit Tensor4(int n_) : n(n_), data(std::size_t(n_) * n_ * n_ * n_, 0.0) {}

  std::size_t index(int p, int q, int r, int s) const {
    return ((std::size_t(p) * n + q) * n + r) * n + s;
  }
  double& operator()(int p, int q, int r, int s) { return data[index(p, q, r, s)]; }
  double operator()(int p, int q, int r, int s) const { return data[index(p, q, r, s)]; }
};

// max |X_pqrs - X_{perm}| over the three generators of the 8-fold group.
double eightfold_violation(const Tensor4& t);

}  // namespace gforge
