// Compares the ultimate lower bound with a simulated local SPRT for one
// qubit pair: r0 = 0.7, r1 = 0.9, relative angle pi/10.

#include <cstdio>
#include <numbers>

#include "seqtest/seqtest.hpp"

int main() {
  using namespace seqtest;
  const QubitPair pair{0.7, 0.9, std::numbers::pi / 10.0};
  const auto [rho, sigma] = make_qubit_pair(pair);
  const ErrorSpec spec = ErrorSpec::strong(1e-6, 1e-9);

  const MeanSampleSizes lower = ultimate_lower_bound(rho, sigma, spec);
  std::printf("D(rho||sigma) = %.6f nats, D(sigma||rho) = %.6f nats\n",
              quantum_relative_entropy(rho, sigma).value(), quantum_relative_entropy(sigma, rho).value());
  std::printf("lower bound: n0 >= %.1f, n1 >= %.1f\n", lower.n0, lower.n1);

  const ProjectiveAngle unbiased{std::numbers::pi / 2.0};
  for (int truth : {0, 1}) {
    const QubitSprtResult r = run_qubit_sprt(pair, unbiased, spec, 0.5, truth, 3000, RngSpec{2024});
    std::printf("local SPRT under H%d: mean %.1f (Wald %.1f), median %.0f, errors %ld\n", truth, r.stats.mean_n,
                r.predicted_mean, r.stats.q50, r.stats.errors);
  }
  std::printf("attainability: %s\n", to_string(attainability_region(pair)).c_str());
}
