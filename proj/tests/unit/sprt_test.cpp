#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "seqtest/montecarlo.hpp"
#include "seqtest/sprt.hpp"
#include "support.hpp"

namespace seqtest {
namespace {

TEST(Thresholds, SymmetricStrong) {
  const SprtThresholds t = thresholds_from_errors(ErrorSpec::strong(1e-3, 1e-3));
  EXPECT_NEAR(t.a, std::log(0.999 / 0.001), 1e-12);
  EXPECT_NEAR(t.b, -t.a, 1e-12);
}

TEST(Thresholds, FixturesFromTheFormula) {
  const SprtThresholds t = thresholds_from_errors(ErrorSpec::strong(0.01, 0.01), 0.5);
  EXPECT_NEAR(t.A, 99.0, 1e-12);
  EXPECT_NEAR(t.B, 1.0 / 99.0, 1e-15);
  const SprtThresholds u = thresholds_from_errors(ErrorSpec::strong(0.01, 0.01), 2.0 / 3.0);
  EXPECT_NEAR(u.A, 198.0, 1e-11);
  EXPECT_NEAR(u.B, 2.0 / 99.0, 1e-15);
  EXPECT_GT(u.a, 0.0);
  EXPECT_LT(u.b, 0.0);
}

TEST(Thresholds, Errors) {
  EXPECT_THROW(ErrorSpec::strong(0.6, 0.5), DomainError);
  EXPECT_THROW(ErrorSpec::strong(0.0, 0.5), DomainError);
  EXPECT_THROW(ErrorSpec::weak(0.5, 0.5), DomainError);
  EXPECT_THROW(ErrorSpec::symmetric(0.5), DomainError);
  EXPECT_THROW(thresholds_from_errors(ErrorSpec::strong(0.01, 0.01), 1.0), DomainError);
  // A prior this lopsided leaves no room to continue.
  EXPECT_THROW(thresholds_from_errors(ErrorSpec::strong(0.3, 0.3), 0.01), DomainError);
  EXPECT_THROW(parse_error_mode("loose"), ValidationError);
  EXPECT_EQ(parse_error_mode("weak"), ErrorMode::kWeakAsymmetric);
}

TEST(ErrorsFromThresholds, Fixtures) {
  const auto [a1, b1] = errors_from_thresholds(make_thresholds(99.0, 1.0 / 99.0, 0.5));
  EXPECT_NEAR(a1, 0.01, 1e-15);
  EXPECT_NEAR(b1, 0.01, 1e-15);
  const auto [a2, b2] = errors_from_thresholds(make_thresholds(9.0, 1.0 / 9.0, 0.5));
  EXPECT_NEAR(a2, 0.1, 1e-15);
  EXPECT_NEAR(b2, 0.1, 1e-15);
  const auto [a3, b3] = errors_from_thresholds(make_thresholds(1e12, 0.2, 0.5));
  EXPECT_LT(a3, 1e-11);
  EXPECT_NEAR(b3, 0.2, 1e-11);
  EXPECT_THROW(make_thresholds(0.9, 0.5, 0.5), DomainError);
  EXPECT_THROW(errors_from_thresholds(SprtThresholds{0.0, -1.0, 1.0, 0.5, 0.5}), DomainError);
}

TEST(ErrorsFromThresholds, WaldInequalitiesRoundTrip) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> le(-12.0, -1.5);
  for (int rep = 0; rep < 200; ++rep) {
    const ErrorSpec spec = ErrorSpec::strong(std::pow(10.0, le(gen)), std::pow(10.0, le(gen)));
    const SprtThresholds t = thresholds_from_errors(spec);
    const auto [alpha, beta] = errors_from_thresholds(t);
    EXPECT_LE(alpha, (1.0 - beta) / t.A * (1.0 + 1e-12));
    EXPECT_LE(beta, (1.0 - alpha) * t.B * (1.0 + 1e-12));
    // Equalities hold exactly in the no-overshoot model.
    EXPECT_NEAR(alpha * t.A, 1.0 - beta, 1e-12);
  }
}

TEST(WaldMeanPositions, Fixtures) {
  const SprtThresholds t = make_thresholds(99.0, 1.0 / 99.0, 0.5);
  const auto [z0, z1] = wald_mean_positions(t, 0.0, 0.0);
  EXPECT_EQ(z0, t.b);
  EXPECT_EQ(z1, t.a);
  const auto [w0, w1] = wald_mean_positions(t, 0.01, 0.01);
  EXPECT_NEAR(w1, -w0, 1e-14);
  EXPECT_NEAR(w1, 0.98 * std::log(99.0), 1e-14);
}

TEST(MeanCopiesClassical, SymmetricFixture) {
  const OutcomeDistribution p{0.9, 0.1}, q{0.1, 0.9};
  const ErrorSpec spec = ErrorSpec::strong(1e-3, 1e-3);
  const MeanSampleSizes m = mean_copies_classical(p, q, spec);
  const auto [alpha, beta] = errors_from_thresholds(thresholds_from_errors(spec));
  EXPECT_NEAR(m.n0, std::log(999.0) * (1.0 - 2.0 * beta) / (0.8 * std::log(9.0)), 1e-12);
  EXPECT_NEAR(m.n0, m.n1, 1e-12);
  EXPECT_NEAR(alpha, beta, 1e-15);
  EXPECT_NEAR(m.bayes, m.n0, 1e-12);
  EXPECT_NEAR(m.worst_case, m.n0, 1e-12);
  EXPECT_FALSE(m.warnings.empty());
}

TEST(MeanCopiesClassical, AgreesWithSimulation) {
  // Small steps relative to the thresholds keep the overshoot negligible.
  const OutcomeDistribution p{0.6, 0.4}, q{0.4, 0.6};
  const ErrorSpec spec = ErrorSpec::strong(1e-3, 1e-3);
  const MeanSampleSizes m = mean_copies_classical(p, q, spec);
  const SprtThresholds t = thresholds_from_errors(spec);
  const BatchStats s = run_sprt_trials(p, q, t, 0, 100000, RngSpec{1});
  EXPECT_NEAR(s.mean_n / m.n0, 1.0, 0.10);
  const auto [alpha, beta] = errors_from_thresholds(t);
  EXPECT_LE(s.empirical_alpha, 1.2 * alpha);
}

TEST(MeanCopiesClassical, WeightedDivergencesAgreeUnderSymmetricErrors) {
  const OutcomeDistribution p{0.7, 0.2, 0.1}, q{0.3, 0.3, 0.4};
  const MeanSampleSizes m = mean_copies_classical(p, q, ErrorSpec::strong(1e-5, 1e-5));
  EXPECT_NEAR(m.n0 * classical_kl(p, q).value(), m.n1 * classical_kl(q, p).value(), 1e-10);
}

TEST(MeanCopiesClassical, OvershootWarningAndErrors) {
  const OutcomeDistribution p{0.99, 0.01}, q{0.01, 0.99};
  const MeanSampleSizes m = mean_copies_classical(p, q, ErrorSpec::strong(1e-4, 1e-4));
  EXPECT_NEAR(m.n0, 2.05, 0.01);
  bool flagged = false;
  for (const auto& w : m.warnings) flagged |= w.find("overshoot") != std::string::npos;
  EXPECT_TRUE(flagged);
  EXPECT_THROW(mean_copies_classical(p, p, ErrorSpec::strong(1e-3, 1e-3)), DomainError);
}

TEST(AsymptoticMeanCopies, Fixtures) {
  const OutcomeDistribution p{0.9, 0.1}, q{0.1, 0.9};
  const MeanSampleSizes m = asymptotic_mean_copies(p, q, ErrorSpec::strong(1e-3, 1e-3));
  EXPECT_NEAR(m.n0, 6.907755278982137 / (0.8 * std::log(9.0)), 1e-12);
  EXPECT_NEAR(m.n0, 3.93, 0.005);
  EXPECT_TRUE(m.leading_order);

  const MeanSampleSizes w = asymptotic_mean_copies(p, q, ErrorSpec::weak(0.05, 1e-6));
  EXPECT_NEAR(w.n0, 0.95 * -std::log(1e-6) / classical_kl(p, q).value(), 1e-12);
  EXPECT_TRUE(w.n1_order_one);
  EXPECT_FALSE(w.warnings.empty());

  // Errors outside the small-error regime are flagged, not rejected.
  const MeanSampleSizes big = asymptotic_mean_copies(p, q, ErrorSpec::strong(0.3, 0.3));
  EXPECT_FALSE(big.warnings.empty());
}

TEST(AsymptoticMeanCopies, RatioToWaldTendsToOne) {
  const OutcomeDistribution p{0.65, 0.35}, q{0.35, 0.65};
  double prev = kInf;
  for (double eps : {1e-6, 1e-9, 1e-12}) {
    const ErrorSpec spec = ErrorSpec::strong(eps, eps);
    const double ratio = asymptotic_mean_copies(p, q, spec).n0 / mean_copies_classical(p, q, spec).n0;
    EXPECT_GE(ratio, 1.0);
    EXPECT_LT(ratio - 1.0, prev);
    prev = ratio - 1.0;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(UltimateLowerBound, Fixtures) {
  const auto [p0, p1] = make_qubit_pair(1.0, 1.0, std::numbers::pi);
  const MeanSampleSizes orth = ultimate_lower_bound(p0, p1, ErrorSpec::strong(1e-3, 1e-3));
  EXPECT_TRUE(orth.n0_order_one);
  EXPECT_TRUE(orth.n1_order_one);
  EXPECT_EQ(orth.n0, 1.0);

  const auto [rho, sigma] = make_qubit_pair(0.5, 0.5, std::numbers::pi);
  const ErrorSpec spec = ErrorSpec::strong(1e-8, 1e-8);
  const MeanSampleSizes m = ultimate_lower_bound(rho, sigma, spec);
  const double A = thresholds_from_errors(spec).A;
  EXPECT_NEAR(m.n0, -std::log(1e-8) * (1.0 - 1.0 / A) / (0.5 * std::log(3.0)), 1e-9);
  EXPECT_NEAR(m.n0, 33.5, 0.05);

  EXPECT_THROW(ultimate_lower_bound(rho, rho, spec), DomainError);
}

TEST(UltimateLowerBound, WorstCaseFollowsSmallerDivergence) {
  const auto [rho, sigma] = make_qubit_pair(0.9, 0.3, 1.0);
  const double d01 = quantum_relative_entropy(rho, sigma).value();
  const double d10 = quantum_relative_entropy(sigma, rho).value();
  ASSERT_LT(d01, d10);
  const MeanSampleSizes m = ultimate_lower_bound(rho, sigma, ErrorSpec::strong(1e-6, 1e-6));
  EXPECT_EQ(m.worst_case, m.n0);
  EXPECT_LE(m.bayes, m.worst_case);
}

TEST(UltimateLowerBound, BelowEveryMeasuredStrategy) {
  // Data processing: any POVM gives a classical pair with smaller divergences.
  std::mt19937_64 gen(37);
  std::normal_distribution<double> normal;
  const auto [rho, sigma] = make_qubit_pair(0.8, 0.6, 1.2);
  const ErrorSpec spec = ErrorSpec::strong(1e-6, 1e-6);
  const MeanSampleSizes lower = ultimate_lower_bound(rho, sigma, spec);
  for (int rep = 0; rep < 50; ++rep) {
    // Random 3-outcome POVM: E_k = S^{-1/2} G_k S^{-1/2} with S = sum G_k.
    std::vector<ComplexMatrix> g(3);
    ComplexMatrix total = ComplexMatrix::Zero(2, 2);
    for (auto& gk : g) {
      ComplexMatrix a(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = Complex(normal(gen), normal(gen));
      gk = a * a.adjoint();
      total += gk;
    }
    const ComplexMatrix root = total.sqrt().inverse();
    std::vector<double> p, q;
    for (const auto& gk : g) {
      const ComplexMatrix e = root * gk * root;
      p.push_back((e * rho.matrix()).trace().real());
      q.push_back((e * sigma.matrix()).trace().real());
    }
    p[2] = 1.0 - p[0] - p[1];
    q[2] = 1.0 - q[0] - q[1];
    const MeanSampleSizes measured = asymptotic_mean_copies(p, q, spec);
    EXPECT_LE(lower.n0, measured.n0);
    EXPECT_LE(lower.n1, measured.n1);
  }
}

}  // namespace
}  // namespace seqtest
