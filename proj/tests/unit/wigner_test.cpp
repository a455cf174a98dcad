#include <gtest/gtest.h>

#include <numbers>

#include "seqtest/wigner.hpp"

namespace seqtest {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Wigner, SpinHalf) {
  const double th = 0.8;
  const RealMatrix d = wigner_small_d(1, th);
  // Rows and columns: m = -1/2, +1/2.
  EXPECT_NEAR(d(1, 1), std::cos(th / 2.0), 1e-15);
  EXPECT_NEAR(d(0, 0), std::cos(th / 2.0), 1e-15);
  EXPECT_NEAR(d(1, 0), -std::sin(th / 2.0), 1e-15);
  EXPECT_NEAR(d(0, 1), std::sin(th / 2.0), 1e-15);
  const WignerRow w = wigner_row(1, th);
  EXPECT_NEAR(w.amplitudes_squared(1, 1), std::pow(std::cos(th / 2.0), 2), 1e-15);
  EXPECT_NEAR(w.amplitudes_squared(1, 0), std::pow(std::sin(th / 2.0), 2), 1e-15);
}

TEST(Wigner, SpinOneClosedForm) {
  const double th = 1.1, c = std::cos(th), s = std::sin(th);
  RealMatrix oracle(3, 3);
  // Rows m = -1, 0, 1.
  oracle << (1 + c) / 2, s / std::sqrt(2.0), (1 - c) / 2,  //
      -s / std::sqrt(2.0), c, s / std::sqrt(2.0),          //
      (1 - c) / 2, -s / std::sqrt(2.0), (1 + c) / 2;
  EXPECT_LT((wigner_small_d(2, th) - oracle).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(wigner_row(2, kPi / 2.0).amplitudes_squared(1, 1), 0.0, 1e-15);
}

TEST(Wigner, IdentityAtZeroAndFlipAtPi) {
  for (int tj : {0, 1, 4, 7}) {
    EXPECT_TRUE(wigner_small_d(tj, 0.0).isIdentity());
    EXPECT_LT((wigner_small_d(tj, kPi) - wigner_small_d_sum(tj, kPi)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Wigner, RecursionMatchesFactorialSumUpToJ32) {
  for (int tj : {3, 10, 25, 40, 64}) {
    for (double th : {1e-3, 0.3, kPi / 2.0, 2.9, kPi - 1e-3}) {
      const RealMatrix rec = wigner_small_d(tj, th);
      const RealMatrix sum = wigner_small_d_sum(tj, th);
      EXPECT_LT((rec - sum).cwiseAbs().maxCoeff(), 1e-10) << "2j = " << tj << ", theta = " << th;
    }
  }
}

TEST(Wigner, OrthogonalAndDoublyStochastic) {
  for (int tj : {5, 31, 64, 128}) {
    const RealMatrix d = wigner_small_d(tj, 1.234);
    const int n = tj + 1;
    EXPECT_LT((d * d.transpose() - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    const RealMatrix sq = wigner_row(tj, 1.234).amplitudes_squared;
    EXPECT_LT((sq.rowwise().sum() - RealVector::Ones(n)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((sq.colwise().sum().transpose() - RealVector::Ones(n)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Wigner, RejectsBadArguments) {
  EXPECT_THROW(wigner_small_d(-1, 0.5), DomainError);
  EXPECT_THROW(wigner_small_d(2, -0.5), DomainError);
  EXPECT_THROW(wigner_small_d(2, 4.0), DomainError);
}

}  // namespace
}  // namespace seqtest
