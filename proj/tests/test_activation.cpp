#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>

#include "doctest.h"
#include "mpc/activation.hpp"

using namespace mpc;
using Mat = Eigen::MatrixXd;

namespace {

// Reference winner selection: repeated scan for the strictly largest value,
// lowest index on ties.
std::vector<int> pick_winners(const Mat& z, int col, int n) {
  std::vector<char> taken(z.rows(), 0);
  std::vector<int> winners;
  for (int k = 0; k < n; ++k) {
    int best = -1;
    for (int i = 0; i < z.rows(); ++i) {
      if (taken[i]) continue;
      if (best < 0 || z(i, col) > z(best, col)) best = i;
    }
    taken[best] = 1;
    winners.push_back(best);
  }
  return winners;
}

}  // namespace

TEST_CASE("winner masks: exhaustive small vectors") {
  // all vectors over {-2,-1,0,1,2}^n, n <= 5, all winner counts
  for (int n = 1; n <= 5; ++n) {
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 5;
    for (long pattern = 0; pattern < total; ++pattern) {
      Mat z(n, 1);
      long p = pattern;
      for (int i = 0; i < n; ++i, p /= 5) z(i, 0) = double(p % 5) - 2.0;
      for (int nw = 1; nw <= n; ++nw) {
        Activation act{ActKind::nwta, nw};
        Mat mask = derivative_mask(act, z);
        CHECK(mask.sum() == doctest::Approx(nw));
        for (int w : pick_winners(z, 0, nw)) CHECK(mask(w, 0) == 1.0);
        // phi keeps winner values verbatim, zeroes the rest
        Mat phi = apply(act, z);
        for (int i = 0; i < n; ++i)
          CHECK(phi(i, 0) == (mask(i, 0) == 1.0 ? z(i, 0) : 0.0));
        // winner sets are invariant under positive rescaling
        Mat z3 = 3.0 * z;
        CHECK((derivative_mask(act, z3).array() == mask.array()).all());
      }
    }
  }
}

TEST_CASE("ties resolve to the lowest index, deterministically") {
  Mat z(4, 1);
  z << 1.0, 1.0, 1.0, 1.0;
  Activation act{ActKind::nwta, 2};
  Mat mask = derivative_mask(act, z);
  CHECK(mask(0, 0) == 1.0);
  CHECK(mask(1, 0) == 1.0);
  CHECK(mask(2, 0) == 0.0);
  CHECK(mask(3, 0) == 0.0);
  for (int rep = 0; rep < 10; ++rep)
    CHECK((derivative_mask(act, z).array() == mask.array()).all());
}

TEST_CASE("per-column independence in batches") {
  Mat z(3, 2);
  z << 5, -1, 1, 7, 3, 0;
  Mat mask = derivative_mask(Activation{ActKind::nwta, 1}, z);
  CHECK(mask(0, 0) == 1.0);
  CHECK(mask(1, 1) == 1.0);
  CHECK(mask.sum() == doctest::Approx(2.0));
}

TEST_CASE("relu and identity masks") {
  Mat z(4, 1);
  z << -1.0, 0.0, 2.0, -0.5;
  Mat relu = derivative_mask(Activation{ActKind::relu, 0}, z);
  CHECK(relu(0, 0) == 0.0);
  CHECK(relu(1, 0) == 0.0);  // derivative taken as 0 at exactly 0
  CHECK(relu(2, 0) == 1.0);
  Mat ident = derivative_mask(Activation{ActKind::identity, 0}, z);
  CHECK((ident.array() == 1.0).all());
  CHECK((apply(Activation{ActKind::identity, 0}, z).array() == z.array()).all());
}

TEST_CASE("winner count outside the layer width is rejected") {
  Mat z(3, 1);
  z.setZero();
  CHECK_THROWS_AS(derivative_mask(Activation{ActKind::nwta, 4}, z), Error);
  CHECK_THROWS_AS(derivative_mask(Activation{ActKind::nwta, 0}, z), Error);
}
