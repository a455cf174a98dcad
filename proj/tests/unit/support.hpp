#pragma once

// Shared fixtures: random states and independent oracles (Schur-Parlett
// matrix functions, Kronecker powers) that share no code with the library.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "seqtest/states.hpp"

namespace seqtest::testing {

// Full-rank random state: G G^dagger / tr with a complex Ginibre G.
inline DensityMatrix random_state(std::mt19937_64& gen, int dim, bool real = false) {
  std::normal_distribution<double> normal;
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(normal(gen), real ? 0.0 : normal(gen));
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix::from(ComplexMatrix(0.5 * (m + m.adjoint())));
}

inline QubitPair random_pair(std::mt19937_64& gen, double r_lo = 0.05, double r_hi = 0.95, double t_lo = 0.1) {
  std::uniform_real_distribution<double> r(r_lo, r_hi);
  std::uniform_real_distribution<double> t(t_lo, std::numbers::pi);
  const double r0 = r(gen);
  const double r1 = r(gen);
  return {r0, r1, t(gen)};
}

// tr rho (log rho - log sigma) through the Schur-Parlett logarithm; full-rank inputs only.
inline double oracle_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const ComplexMatrix lr = rho.log();
  const ComplexMatrix ls = sigma.log();
  return (rho * (lr - ls)).trace().real();
}

inline ComplexMatrix kron_power(const ComplexMatrix& a, int n) {
  ComplexMatrix out = a;
  for (int k = 1; k < n; ++k) out = Eigen::kroneckerProduct(out, a).eval();
  return out;
}

}  // namespace seqtest::testing
