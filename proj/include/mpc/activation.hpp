#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numeric>
#include <type_traits>
#include <vector>

#include "mpc/errors.hpp"

namespace mpc {

enum class ActKind { identity, relu, nwta };

// Elementwise nonlinearity plus its derivative mask. NWTA keeps the N_w
// largest raw values per column (ties broken by lowest index) and zeroes the
// rest; its derivative mask is the winner indicator.
struct Activation {
  ActKind kind = ActKind::nwta;
  int n_winners = 15;

  template <typename Derived>
  void check(const Eigen::MatrixBase<Derived>& z) const {
    if (kind == ActKind::nwta &&
        (n_winners < 1 || n_winners > z.rows()))
      fail(ErrorKind::argument, "n_winners out of range for layer width");
  }
};

namespace detail {

// Winner indicator per column: among the n largest values, lowest index on
// ties. Scratch index buffer avoids per-call allocation on the hot path.
template <typename Mat>
void nwta_mask(const Mat& z, int n, Mat& mask, std::vector<int>& scratch) {
  const int rows = static_cast<int>(z.rows());
  mask.setZero(z.rows(), z.cols());
  scratch.resize(rows);
  for (int c = 0; c < z.cols(); ++c) {
    std::iota(scratch.begin(), scratch.end(), 0);
    auto better = [&](int a, int b) {
      if (z(a, c) != z(b, c)) return z(a, c) > z(b, c);
      return a < b;
    };
    std::nth_element(scratch.begin(), scratch.begin() + (n - 1),
                     scratch.end(), better);
    for (int i = 0; i < n; ++i) mask(scratch[i], c) = 1;
  }
}

// Winner index lists per column (same selection and tie rule as nwta_mask;
// order within a column is unspecified). `win` is n x cols. For float the
// (value desc, index asc) order is packed into one u64 key so the selection
// runs on flat integers: the usual sign-flip transform makes the float bits
// order-monotonic, and the complemented index breaks ties toward lower
// indices. -0.0 is canonicalized to +0.0 first to keep the float semantics.
template <typename Mat>
void nwta_winners(const Mat& z, int n, Eigen::MatrixXi& win,
                  std::vector<int>& scratch) {
  const int rows = static_cast<int>(z.rows());
  win.resize(n, z.cols());
  if constexpr (std::is_same_v<typename Mat::Scalar, float>) {
    static thread_local std::vector<uint64_t> keys;
    keys.resize(rows);
    for (int c = 0; c < z.cols(); ++c) {
      const float* col = z.data() + static_cast<size_t>(c) * rows;
      for (int r = 0; r < rows; ++r) {
        float f = col[r];
        if (f == 0.0f) f = 0.0f;
        uint32_t u;
        std::memcpy(&u, &f, 4);
        u = (u & 0x80000000u) ? ~u : (u | 0x80000000u);
        keys[r] = (static_cast<uint64_t>(u) << 32) |
                  (0xFFFFFFFFu - static_cast<uint32_t>(r));
      }
      std::nth_element(keys.begin(), keys.begin() + (n - 1), keys.end(),
                       std::greater<>());
      for (int i = 0; i < n; ++i)
        win(i, c) = static_cast<int>(0xFFFFFFFFu -
                                     static_cast<uint32_t>(keys[i]));
    }
    return;
  }
  scratch.resize(rows);
  for (int c = 0; c < z.cols(); ++c) {
    std::iota(scratch.begin(), scratch.end(), 0);
    auto better = [&](int a, int b) {
      if (z(a, c) != z(b, c)) return z(a, c) > z(b, c);
      return a < b;
    };
    std::nth_element(scratch.begin(), scratch.begin() + (n - 1),
                     scratch.end(), better);
    for (int i = 0; i < n; ++i) win(i, c) = scratch[i];
  }
}

}  // namespace detail

// Derivative mask of the activation at z (identity: ones; relu: z > 0;
// nwta: winner indicator, same winner set as apply()).
template <typename Mat>
Mat derivative_mask(const Activation& act, const Mat& z) {
  act.check(z);
  switch (act.kind) {
    case ActKind::identity:
      return Mat::Ones(z.rows(), z.cols());
    case ActKind::relu:
      return (z.array() > typename Mat::Scalar(0))
          .template cast<typename Mat::Scalar>();
    case ActKind::nwta: {
      Mat mask;
      std::vector<int> scratch;
      detail::nwta_mask(z, act.n_winners, mask, scratch);
      return mask;
    }
  }
  fail(ErrorKind::argument, "unknown activation kind");
}

template <typename Mat>
Mat apply(const Activation& act, const Mat& z) {
  act.check(z);
  if (act.kind == ActKind::identity) return z;
  // relu and nwta are both linear on their support.
  return z.cwiseProduct(derivative_mask(act, z));
}

}  // namespace mpc
