#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "seqtest/divergences.hpp"
#include "support.hpp"

namespace seqtest {
namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix diag_state(std::initializer_list<double> d) {
  RealVector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return DensityMatrix::from(RealMatrix(v.asDiagonal()));
}

TEST(ClassicalKl, Examples) {
  EXPECT_EQ(classical_kl({0.3, 0.7}, {0.3, 0.7}).value(), 0.0);
  EXPECT_NEAR(classical_kl({1.0, 0.0}, {0.5, 0.5}).value(), std::log(2.0), 1e-15);
  EXPECT_NEAR(classical_kl({0.9, 0.1}, {0.1, 0.9}).value(), 0.8 * std::log(9.0), 1e-14);
  EXPECT_TRUE(classical_kl({0.5, 0.5}, {1.0, 0.0}).is_infinite());
  EXPECT_THROW(classical_kl({0.5, 0.5}, {0.2, 0.3, 0.5}), ShapeError);
}

TEST(ClassicalKl, NonnegativeWithEqualityOnlyAtEquality) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(4), b(4);
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < 4; ++i) {
      sa += a[i] = u(gen);
      sb += b[i] = u(gen);
    }
    for (int i = 0; i < 4; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    // Renormalize the last entry so the sum is 1 to machine precision.
    a[3] = 1.0 - a[0] - a[1] - a[2];
    b[3] = 1.0 - b[0] - b[1] - b[2];
    EXPECT_GT(classical_kl(a, b).value(), 1e-12);
    EXPECT_LE(classical_kl(a, a).value(), 1e-12);
  }
}

TEST(OutcomeDistribution, Validation) {
  EXPECT_THROW(OutcomeDistribution({1.0}), ValidationError);
  EXPECT_THROW(OutcomeDistribution({0.5, 0.6}), ValidationError);
  EXPECT_THROW(OutcomeDistribution({1.5, -0.5}), ValidationError);
}

TEST(QuantumRelativeEntropy, Examples) {
  const auto [rho, sigma] = make_qubit_pair(0.5, 0.5, kPi);
  EXPECT_NEAR(quantum_relative_entropy(rho, rho).value(), 0.0, 1e-14);
  EXPECT_NEAR(quantum_relative_entropy(rho, sigma).value(), 0.5 * std::log(3.0), 1e-14);
  const auto [p0, p1] = make_qubit_pair(1.0, 1.0, kPi / 3.0);
  EXPECT_TRUE(quantum_relative_entropy(p0, p1).is_infinite());
  // Pure rho against a full-rank sigma is finite: -<psi| ln sigma |psi>.
  const auto [p, m] = make_qubit_pair(1.0, 0.5, kPi / 3.0);
  EXPECT_TRUE(quantum_relative_entropy(p, m).is_finite());
  EXPECT_THROW(quantum_relative_entropy(rho, DensityMatrix::maximally_mixed(3)), ShapeError);
}

TEST(QuantumRelativeEntropy, MatchesSchurParlettLogarithm) {
  std::mt19937_64 gen(11);
  for (int d = 2; d <= 4; ++d) {
    for (int rep = 0; rep < 10; ++rep) {
      const DensityMatrix rho = testing::random_state(gen, d);
      const DensityMatrix sigma = testing::random_state(gen, d);
      EXPECT_NEAR(quantum_relative_entropy(rho, sigma).value(),
                  testing::oracle_relative_entropy(rho.matrix(), sigma.matrix()), 1e-10);
    }
  }
}

TEST(QuantumRelativeEntropy, CommutingReducesToClassical) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double a = u(gen), b = u(gen), c = u(gen), x = u(gen), y = u(gen), z = u(gen);
    const std::vector<double> p{a / (a + b + c), b / (a + b + c), 1.0 - a / (a + b + c) - b / (a + b + c)};
    const std::vector<double> q{x / (x + y + z), y / (x + y + z), 1.0 - x / (x + y + z) - y / (x + y + z)};
    // Rotate both by the same unitary: the pair still commutes.
    const ComplexMatrix u3 = testing::random_state(gen, 3).matrix().householderQr().householderQ();
    const RealVector pv = Eigen::Map<const RealVector>(p.data(), 3);
    const RealVector qv = Eigen::Map<const RealVector>(q.data(), 3);
    const ComplexMatrix rm = u3 * pv.cast<Complex>().asDiagonal() * u3.adjoint();
    const ComplexMatrix sm = u3 * qv.cast<Complex>().asDiagonal() * u3.adjoint();
    const DensityMatrix rho = DensityMatrix::from(ComplexMatrix(0.5 * (rm + rm.adjoint())));
    const DensityMatrix sigma = DensityMatrix::from(ComplexMatrix(0.5 * (sm + sm.adjoint())));
    EXPECT_NEAR(quantum_relative_entropy(rho, sigma).value(), classical_kl(p, q).value(), 1e-10);
  }
}

TEST(SandwichedRenyi, Examples) {
  const DensityMatrix a = diag_state({0.75, 0.25});
  const DensityMatrix b = diag_state({0.25, 0.75});
  EXPECT_NEAR(sandwiched_renyi(a, a, 2.0).value(), 0.0, 1e-14);
  // Classical order-2 divergence: ln sum p^2/q.
  EXPECT_NEAR(sandwiched_renyi(a, b, 2.0).value(), std::log(0.5625 / 0.25 + 0.0625 / 0.75), 1e-13);
  EXPECT_THROW(sandwiched_renyi(a, b, 1.0), DomainError);
  const auto [p0, p1] = make_qubit_pair(1.0, 1.0, 1.0);
  EXPECT_TRUE(sandwiched_renyi(p0, p1, 2.0).is_infinite());
}

TEST(SandwichedRenyi, MatchesMatrixPowerOracle) {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 10; ++rep) {
    const DensityMatrix rho = testing::random_state(gen, 3);
    const DensityMatrix sigma = testing::random_state(gen, 3);
    for (double s : {1.3, 2.0, 4.5}) {
      const double g = (1.0 - s) / (2.0 * s);
      const ComplexMatrix sp = sigma.matrix().pow(g);
      const ComplexMatrix inner = sp * rho.matrix() * sp;
      const double oracle = std::log(inner.pow(s).trace().real()) / (s - 1.0);
      EXPECT_NEAR(sandwiched_renyi(rho, sigma, s).value(), oracle, 1e-10);
    }
  }
}

TEST(SandwichedRenyi, MonotoneInOrderAndTendsToRelativeEntropy) {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 20; ++rep) {
    const QubitPair pr = testing::random_pair(gen);
    const auto [rho, sigma] = make_qubit_pair(pr);
    double prev = 0.0;
    for (double s = 1.01; s <= 50.0; s *= 1.2) {
      const double v = sandwiched_renyi(rho, sigma, s).value();
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
    EXPECT_NEAR(sandwiched_renyi(rho, sigma, 1.0 + 1e-4).value(), quantum_relative_entropy(rho, sigma).value(),
                1e-3);
    EXPECT_LE(sandwiched_renyi(rho, sigma, 1.5).value(), sandwiched_renyi(rho, sigma, 3.0).value());
  }
}

TEST(ChernoffExponent, Examples) {
  const DensityMatrix a = diag_state({0.75, 0.25});
  const DensityMatrix b = diag_state({0.25, 0.75});
  EXPECT_NEAR(chernoff_exponent(a, a).value(), 0.0, 1e-12);
  EXPECT_NEAR(chernoff_exponent(a, b).value(), -std::log(2.0 * std::sqrt(0.1875)), 1e-12);
  const auto [p0, p1] = make_qubit_pair(1.0, 1.0, kPi);
  EXPECT_TRUE(chernoff_exponent(p0, p1).is_infinite());
}

TEST(ChernoffExponent, SymmetricAndMatchesGridSearch) {
  std::mt19937_64 gen(19);
  for (int rep = 0; rep < 20; ++rep) {
    const DensityMatrix rho = testing::random_state(gen, 3);
    const DensityMatrix sigma = testing::random_state(gen, 3);
    const double xi = chernoff_exponent(rho, sigma).value();
    EXPECT_NEAR(xi, chernoff_exponent(sigma, rho).value(), 1e-9);
    double best = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double s = k / 2000.0;
      const double tr = (rho.matrix().pow(1.0 - s) * sigma.matrix().pow(s)).trace().real();
      best = std::max(best, -std::log(tr));
    }
    EXPECT_GE(xi, best - 1e-12);
    EXPECT_NEAR(xi, best, 1e-6);
  }
}

TEST(StrongConverseKappa, MatchesGridOracle) {
  const DensityMatrix a = diag_state({0.75, 0.25});
  const DensityMatrix b = diag_state({0.25, 0.75});
  const double eps = 1e-6;
  const double xi = -std::log(eps);
  double best = -1.0;
  for (int k = 1; k <= 200000; ++k) {
    const double s = 1.0 + 99.0 * k / 200000.0;
    // Classical sandwiched divergence of commuting states.
    const double dt = std::log(std::pow(0.75, s) * std::pow(0.25, 1.0 - s) + std::pow(0.25, s) * std::pow(0.75, 1.0 - s)) /
                      (s - 1.0);
    best = std::max(best, (s - 1.0) / s * (xi - dt) / xi);
  }
  const KappaResult r = strong_converse_kappa_detail(a, b, 1, eps);
  EXPECT_NEAR(r.kappa, best, 1e-6);
  EXPECT_GT(r.kappa, 0.0);
  EXPECT_LT(r.kappa, 1.0);
  EXPECT_NEAR(r.n_star, xi / (0.5 * std::log(3.0)), 1e-9);
}

TEST(StrongConverseKappa, DomainAndLimits) {
  const DensityMatrix a = diag_state({0.75, 0.25});
  const DensityMatrix b = diag_state({0.25, 0.75});
  const double eps = 1e-6;
  const double n_star = -std::log(eps) / (0.5 * std::log(3.0));  // 25.15
  EXPECT_THROW(strong_converse_kappa(a, b, 26, eps), DomainError);
  EXPECT_THROW(strong_converse_kappa(a, b, 0, eps), DomainError);
  EXPECT_THROW(strong_converse_kappa(a, a, 1, eps), DomainError);
  const auto [p0, p1] = make_qubit_pair(1.0, 1.0, 1.0);
  EXPECT_THROW(strong_converse_kappa(p0, p1, 1, eps), DomainError);
  // Decreasing toward zero as n approaches n*.
  double prev = 1.0;
  for (int n = 1; n < n_star; ++n) {
    const double k = strong_converse_kappa(a, b, n, eps);
    EXPECT_GT(k, 0.0);
    EXPECT_LT(k, prev);
    prev = k;
  }
  EXPECT_LT(prev, 0.01);
}

TEST(Pinch, Examples) {
  const auto [rho, sigma] = make_qubit_pair(0.6, 0.8, 1.0);
  const DensityMatrix same = pinch(sigma, {ComplexMatrix::Identity(2, 2)});
  EXPECT_LT((same.matrix() - sigma.matrix()).norm(), 1e-15);
  const DensityMatrix own = pinch(sigma, rank_one_eigenprojectors(sigma));
  EXPECT_LT((own.matrix() - sigma.matrix()).norm(), 1e-12);

  // x-pointing qubit pinched in the z basis loses its coherence.
  RealMatrix x(2, 2);
  x << 0.5, 0.4, 0.4, 0.5;
  ComplexMatrix z0 = ComplexMatrix::Zero(2, 2), z1 = ComplexMatrix::Zero(2, 2);
  z0(0, 0) = 1.0;
  z1(1, 1) = 1.0;
  const DensityMatrix out = pinch(DensityMatrix::from(x), {z0, z1});
  EXPECT_LT((out.matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm(), 1e-15);

  EXPECT_THROW(pinch(sigma, {z0}), ValidationError);
  EXPECT_THROW(pinch(sigma, {z0, z0}), ValidationError);
  EXPECT_THROW(pinch(sigma, {}), ValidationError);
  EXPECT_THROW(pinch(sigma, {ComplexMatrix::Identity(2, 2) * 0.5, ComplexMatrix::Identity(2, 2) * 0.5}),
               ValidationError);
}

TEST(PinchingDecomposition, CommutingPairHasNoCorrection) {
  const DensityMatrix a = diag_state({0.6, 0.3, 0.1});
  const DensityMatrix b = diag_state({0.2, 0.5, 0.3});
  const PinchingDecomposition d = pinching_decomposition_residual(a, b, a);
  EXPECT_NEAR(d.log_correction, 0.0, 1e-14);
  EXPECT_NEAR(d.relative_entropy.value(), d.pinched_relative_entropy.value(), 1e-14);
}

TEST(PinchingDecomposition, IdentityOnRandomPairs) {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = rep % 2 == 0 ? 2 : 3;
    const DensityMatrix rho = testing::random_state(gen, d);
    const DensityMatrix sigma = testing::random_state(gen, d);
    const PinchingDecomposition r = pinching_decomposition_residual(rho, sigma, rho);
    EXPECT_LT(std::abs(r.residual()), 1e-9);
    EXPECT_NEAR(r.relative_entropy.value(), testing::oracle_relative_entropy(rho.matrix(), sigma.matrix()), 1e-10);
  }
}

TEST(PinchingDecomposition, MaximallyMixedNull) {
  std::mt19937_64 gen(29);
  const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  const DensityMatrix sigma = testing::random_state(gen, 2);
  const PinchingDecomposition r = pinching_decomposition_residual(rho, sigma, rho);
  const double closed = -std::log(2.0) - 0.5 * sigma.matrix().log().trace().real();
  EXPECT_NEAR(r.relative_entropy.value(), closed, 1e-12);
  EXPECT_LT(std::abs(r.residual()), 1e-9);
}

TEST(PinchingDecomposition, RejectsBasisThatMovesRho) {
  const auto [rho, sigma] = make_qubit_pair(0.6, 0.8, 1.0);
  EXPECT_THROW(pinching_decomposition_residual(rho, sigma, sigma), ValidationError);
}

TEST(OmegaUpperBound, Examples) {
  EXPECT_NEAR(omega_upper_bound({DensityMatrix::maximally_mixed(3)}).value(), std::log(3.0), 1e-14);
  EXPECT_NEAR(omega_upper_bound({diag_state({0.9, 0.1})}).value(), std::log(10.0), 1e-13);
  EXPECT_NEAR(omega_upper_bound({diag_state({0.8, 0.2}), diag_state({0.95, 0.05})}).value(), std::log(20.0), 1e-13);
  EXPECT_TRUE(omega_upper_bound({diag_state({1.0, 0.0})}).is_infinite());
  EXPECT_THROW(omega_upper_bound({}), ValidationError);
}

}  // namespace
}  // namespace seqtest
