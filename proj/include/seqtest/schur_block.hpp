#pragma once

// Block sampling of l iid qubit copies in the total-spin basis |j, m>:
// multiplicities, outcome distributions under both hypotheses, finite-l
// measured relative entropies, their closed-form limits, the attainability
// regions of the worst-case bound, and the sequential J^2 detector for a
// pure null hypothesis.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seqtest/divergences.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/states.hpp"
#include "seqtest/wigner.hpp"

namespace seqtest {

using u128 = unsigned __int128;

inline constexpr int kDefaultMaxEll = 64;
inline constexpr int kMaxExactEll = 120;

/// Block-length budget; SEQTEST_MAX_ELL overrides the default of 64.
inline int max_block_length() {
  if (const char* env = std::getenv("SEQTEST_MAX_ELL")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
    throw ValidationError(std::string("SEQTEST_MAX_ELL is not a positive integer: ") + env);
  }
  return kDefaultMaxEll;
}

inline void check_block_budget(int ell) {
  if (ell < 1) throw DomainError("block length must be positive");
  const int cap = max_block_length();
  if (ell > cap) {
    std::ostringstream os;
    os << "block length " << ell << " exceeds the limit " << cap << " (raise SEQTEST_MAX_ELL)";
    throw ResourceError(os.str());
  }
}

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

/// Total-spin sectors of l qubits. Index i runs over j = j_min..l/2.
struct BlockBasis {
  int ell = 0;
  std::vector<int> twice_j;
  std::vector<double> log_nu;
  // Exact multiplicities for l <= 120.
  std::optional<std::vector<u128>> nu;

  std::size_t size() const { return twice_j.size(); }
};

namespace detail {

inline u128 binomial_exact(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  // r * (n - k + i) / i stays exact: r is C(n-k+i-1, i-1) before the step.
  for (int i = 1; i <= k; ++i) r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
  return r;
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace detail

/// nu_j = C(l, l/2 - j) (2j + 1)/(l/2 + j + 1).
inline BlockBasis block_basis(int ell) {
  if (ell < 1) throw DomainError("block length must be positive");
  BlockBasis basis;
  basis.ell = ell;
  const bool exact = ell <= kMaxExactEll;
  if (exact) basis.nu.emplace();
  for (int tj = ell % 2; tj <= ell; tj += 2) {
    const int k = (ell - tj) / 2;  // l/2 - j
    const int num = tj + 1;
    const int den = (ell + tj) / 2 + 1;
    basis.twice_j.push_back(tj);
    basis.log_nu.push_back(detail::log_binomial(ell, k) + std::log(static_cast<double>(num) / den));
    if (exact) {
      const u128 full = detail::binomial_exact(ell, k) * static_cast<u128>(num);
      if (full % static_cast<u128>(den) != 0) throw NumericalError("multiplicity is not an integer");
      basis.nu->push_back(full / static_cast<u128>(den));
    }
  }
  return basis;
}

/// Probability table over (j, m); weights[i][k] is the weight of m = k - j_i.
struct JointJMDistribution {
  int ell = 0;
  std::vector<int> twice_j;
  std::vector<std::vector<double>> log_weights;

  double weight(std::size_t i, std::size_t k) const { return std::exp(log_weights[i][k]); }

  double total() const {
    double t = 0.0;
    for (const auto& row : log_weights)
      for (double lw : row) t += std::exp(lw);
    return t;
  }

  double j_marginal(std::size_t i) const {
    double t = 0.0;
    for (double lw : log_weights[i]) t += std::exp(lw);
    return t;
  }
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& xs) {
  double mx = -kInf;
  for (double x : xs) mx = std::max(mx, x);
  if (std::isinf(mx)) return mx;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// log of nu_j a^(l/2+m) b^(l/2-m) with a = (1+r)/2, b = (1-r)/2 and 0^0 = 1.
inline std::vector<std::vector<double>> diagonal_log_weights(const BlockBasis& basis, double r) {
  const double la = std::log((1.0 + r) / 2.0);
  const double lb = r >= 1.0 ? -kInf : std::log((1.0 - r) / 2.0);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int tj = basis.twice_j[i];
    std::vector<double> row(tj + 1);
    for (int k = 0; k <= tj; ++k) {
      const int up = (basis.ell - tj) / 2 + k;  // l/2 + m
      const int down = basis.ell - up;          // l/2 - m
      row[k] = basis.log_nu[i] + up * la + (down == 0 ? 0.0 : down * lb);
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline void check_purity(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) {
    std::ostringstream os;
    os << "purity " << name << " = " << r << " outside [0,1]";
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// Spectrum of the l-fold state with Bloch length r in the (j, m) basis.
struct SpectrumWeights {
  int ell = 0;
  std::vector<int> twice_j;
  std::vector<double> q_j;
  std::vector<std::vector<double>> q_cond;  // q(m | j), m = -j..j
};

inline SpectrumWeights spectrum_weights(int ell, double r) {
  detail::check_purity(r, "r");
  check_block_budget(ell);
  const BlockBasis basis = block_basis(ell);
  const auto lw = detail::diagonal_log_weights(basis, r);
  SpectrumWeights out{ell, basis.twice_j, {}, {}};
  for (const auto& row : lw) {
    const double lz = detail::log_sum_exp(row);
    out.q_j.push_back(std::exp(lz));
    std::vector<double> cond(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) cond[k] = std::isinf(lz) ? 0.0 : std::exp(row[k] - lz);
    out.q_cond.push_back(std::move(cond));
  }
  return out;
}

/// Joint (j, m) distributions of the J^2, J_z measurement in sigma's eigenbasis:
/// p under rho (rotated by theta), q under sigma.
inline std::pair<JointJMDistribution, JointJMDistribution> joint_distributions(const QubitPair& pair, int ell) {
  pair.validate();
  check_block_budget(ell);
  const BlockBasis basis = block_basis(ell);
  JointJMDistribution q{ell, basis.twice_j, detail::diagonal_log_weights(basis, pair.r1)};
  JointJMDistribution p{ell, basis.twice_j, {}};
  const auto unrotated = detail::diagonal_log_weights(basis, pair.r0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int tj = basis.twice_j[i];
    const RealMatrix d2 = wigner_small_d(tj, pair.theta).cwiseAbs2();
    const auto& src = unrotated[i];
    double mx = -kInf;
    for (double x : src) mx = std::max(mx, x);
    std::vector<double> row(tj + 1, -kInf);
    if (!std::isinf(mx)) {
      RealVector scaled(tj + 1);
      for (int k = 0; k <= tj; ++k) scaled(k) = std::exp(src[k] - mx);
      const RealVector mixed = d2 * scaled;
      for (int k = 0; k <= tj; ++k) row[k] = mixed(k) > 0.0 ? mx + std::log(mixed(k)) : -kInf;
    }
    p.log_weights.push_back(std::move(row));
  }
  return {std::move(p), std::move(q)};
}

namespace detail {

inline double log_space_kl(const JointJMDistribution& a, const JointJMDistribution& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.log_weights.size(); ++i) {
    for (std::size_t k = 0; k < a.log_weights[i].size(); ++k) {
      const double la = a.log_weights[i][k];
      if (std::isinf(la)) continue;
      const double lb = b.log_weights[i][k];
      if (std::isinf(lb)) return kInf;
      d += std::exp(la) * (la - lb);
    }
  }
  return std::max(d, 0.0);
}

}  // namespace detail

struct MeasuredRates {
  double rate_pq;  // (1/l) D(p_jm || q_jm)
  double rate_qp;  // (1/l) D(q_jm || p_jm)
};

inline MeasuredRates measured_rates(const QubitPair& pair, int ell) {
  const auto [p, q] = joint_distributions(pair, ell);
  return {detail::log_space_kl(p, q) / ell, detail::log_space_kl(q, p) / ell};
}

/// D(lambda_a || lambda_b) between the Bloch spectra ((1 +- r)/2).
inline double spectral_kl(double ra, double rb) {
  const double a0 = (1.0 + ra) / 2.0, a1 = (1.0 - ra) / 2.0;
  const double b0 = (1.0 + rb) / 2.0, b1 = (1.0 - rb) / 2.0;
  double d = 0.0;
  for (auto [x, y] : {std::pair{a0, b0}, std::pair{a1, b1}}) {
    if (x <= 0.0) continue;
    if (y <= 0.0) return kInf;
    d += x * std::log(x / y);
  }
  return std::max(d, 0.0);
}

/// Measured relative entropy D_{M_sigma}(sigma || rho) in sigma's eigenbasis,
/// attained by block sampling as l grows.
inline double asymptotic_rate_sigma_rho(const QubitPair& pair) {
  pair.validate();
  const double base = spectral_kl(pair.r1, pair.r0);
  if (pair.theta == 0.0 || pair.r1 == 0.0) return base;
  const double den = 1.0 + pair.r0 * std::cos(pair.theta);
  if (den <= 0.0) return kInf;
  return base + pair.r1 * std::log((1.0 + pair.r0) / den);
}

/// Closed form of D(rho || sigma) for qubits, which block sampling in sigma's
/// eigenbasis attains: D(lambda_0||lambda_1) + r0 sin^2(theta/2) ln((1+r1)/(1-r1)).
inline double asymptotic_rate_rho_sigma(const QubitPair& pair) {
  pair.validate();
  const double base = spectral_kl(pair.r0, pair.r1);
  const double s2 = std::pow(std::sin(pair.theta / 2.0), 2);
  if (s2 == 0.0 || pair.r0 == 0.0) return base;
  if (pair.r1 >= 1.0) return kInf;
  return base + pair.r0 * s2 * (std::log1p(pair.r1) - std::log1p(-pair.r1));
}

enum class Attainability { kAttainedViaSigma, kAttainedViaRho, kNotAttained };

inline std::string to_string(Attainability a) {
  switch (a) {
    case Attainability::kAttainedViaSigma: return "attained_via_sigma";
    case Attainability::kAttainedViaRho: return "attained_via_rho";
    case Attainability::kNotAttained: return "not_attained";
  }
  return "?";
}

inline constexpr double kChainTol = 1e-9;

/// Whether block sampling in one state's eigenbasis attains the worst-case bound:
/// via sigma iff D(rho||sigma) <= D_{M_sigma}(sigma||rho) <= D(sigma||rho),
/// via rho iff the mirrored chain holds.
inline Attainability attainability_region(const QubitPair& pair) {
  pair.validate();
  const double d01 = asymptotic_rate_rho_sigma(pair);
  const double d10 = asymptotic_rate_rho_sigma(pair.swapped());
  const double m_sigma = asymptotic_rate_sigma_rho(pair);
  const double m_rho = asymptotic_rate_sigma_rho(pair.swapped());
  auto le = [](double x, double y) { return x <= y + kChainTol || (std::isinf(x) && std::isinf(y)); };
  if (le(d01, m_sigma) && le(m_sigma, d10)) return Attainability::kAttainedViaSigma;
  if (le(d10, m_rho) && le(m_rho, d01)) return Attainability::kAttainedViaRho;
  return Attainability::kNotAttained;
}

/// Mean copies under sigma of the per-copy test "project onto psi0": pure rho
/// never fails it, sigma fails with probability (1 - r1 cos(theta))/2.
inline double pure_rho_sequential_mean(const QubitPair& pair) {
  pair.validate();
  if (pair.r0 != 1.0) throw DomainError("pure_rho_sequential_mean requires a pure null state (r0 = 1)");
  const double fail = (1.0 - pair.r1 * std::cos(pair.theta)) / 2.0;
  if (fail <= 0.0) throw DomainError("identical states: the detector never fires");
  return 1.0 / fail;
}

}  // namespace seqtest
