#pragma once

// Single-copy qubit strategies: fixed projective measurements in the x-z
// plane, the optimal measurement angle, the Chernoff copy count of the best
// fixed-size test, and the zero-error unambiguous protocol for pure states.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "seqtest/divergences.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/sprt.hpp"
#include "seqtest/states.hpp"

namespace seqtest {

/// Projective measurement {|phi><phi|, |phi-perp><phi-perp|} with
/// |phi> = cos(phi/2)|0> + sin(phi/2)|1>.
struct ProjectiveAngle {
  double phi = std::numbers::pi / 2.0;

  void validate() const {
    if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
      std::ostringstream os;
      os << "measurement angle phi = " << phi << " outside [0, pi]";
      throw DomainError(os.str());
    }
  }

  std::pair<RealMatrix, RealMatrix> projectors() const {
    validate();
    const Eigen::Vector2d v(std::cos(phi / 2.0), std::sin(phi / 2.0));
    const Eigen::Vector2d w(-std::sin(phi / 2.0), std::cos(phi / 2.0));
    return {v * v.transpose(), w * w.transpose()};
  }
};

namespace detail {

// Born probabilities (1 +- r cos a)/2 written with half-angle squares, so an
// outcome near zero keeps its relative accuracy instead of rounding to 0.
inline OutcomeDistribution bloch_binary(double r, double a) {
  const double mixed = 0.5 * (1.0 - r);
  const double c = std::cos(0.5 * a), s = std::sin(0.5 * a);
  return OutcomeDistribution{mixed + r * c * c, mixed + r * s * s};
}

inline void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.05)) {
    std::ostringstream os;
    os << "error bound eps = " << eps << " must lie in (0, 0.05)";
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// Outcome distributions (p under rho, q under sigma) of the measurement at angle phi.
inline std::pair<OutcomeDistribution, OutcomeDistribution> outcome_distributions(const QubitPair& pair,
                                                                                 const ProjectiveAngle& angle) {
  pair.validate();
  angle.validate();
  const double half = pair.theta / 2.0;
  return {detail::bloch_binary(pair.r0, half - angle.phi), detail::bloch_binary(pair.r1, half + angle.phi)};
}

/// Bayes mean copies of the local SPRT at angle phi in the small-error limit,
/// -(ln eps / 2)(1/D(p||q) + 1/D(q||p)). Returns 1 when both divergences are infinite.
inline double local_bayes_mean(const QubitPair& pair, const ProjectiveAngle& angle, double eps) {
  detail::check_eps(eps);
  const auto [p, q] = outcome_distributions(pair, angle);
  const ExtendedReal d_pq = classical_kl(p, q);
  const ExtendedReal d_qp = classical_kl(q, p);
  if (d_pq.value() <= 0.0 || d_qp.value() <= 0.0) {
    throw DomainError("measurement does not distinguish the states: zero drift");
  }
  const double inv = (d_pq.is_infinite() ? 0.0 : 1.0 / d_pq.value()) + (d_qp.is_infinite() ? 0.0 : 1.0 / d_qp.value());
  if (inv == 0.0) return 1.0;
  return std::max(1.0, -0.5 * std::log(eps) * inv);
}

/// Closed form of local_bayes_mean for equal purities and the unbiased angle phi = pi/2.
inline double unbiased_local_mean(double r, double theta, double eps) {
  detail::check_eps(eps);
  const double x = r * std::sin(theta / 2.0);
  if (!(x > 0.0)) throw DomainError("unbiased measurement does not distinguish the states");
  if (x >= 1.0) return 1.0;
  return std::max(1.0, std::log(eps) / (x * std::log((1.0 - x) / (1.0 + x))));
}

/// Leading term for pure states measured at the fully biased angle phi = theta/2.
inline double biased_pure_local_mean(double theta, double eps) {
  detail::check_eps(eps);
  const double c2 = std::pow(std::cos(theta / 2.0), 2);
  if (!(c2 < 1.0)) throw DomainError("identical pure states");
  if (c2 <= 0.0) return 1.0;
  return std::max(1.0, std::log(eps) / (2.0 * std::log(c2)));
}

struct AngleOptimum {
  ProjectiveAngle angle;
  double mean;
};

/// Minimizes local_bayes_mean over phi in (0, pi): grid scan, golden-section
/// refinement of the best bracket, then comparison with the singular angles
/// theta/2 and pi - theta/2.
inline AngleOptimum optimize_angle(const QubitPair& pair, double eps, int grid_points = 256) {
  pair.validate();
  detail::check_eps(eps);
  if (grid_points < 64) throw DomainError("optimize_angle needs at least 64 grid points");
  auto eval = [&](double phi) {
    try {
      return local_bayes_mean(pair, ProjectiveAngle{phi}, eps);
    } catch (const DomainError&) {
      return kInf;
    }
  };
  const double pi = std::numbers::pi;
  const double step = pi / grid_points;
  int best_k = -1;
  double best = kInf;
  for (int k = 1; k < grid_points; ++k) {
    const double v = eval(k * step);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  AngleOptimum out{ProjectiveAngle{pi / 2.0}, kInf};
  if (best_k > 0) {
    const auto [phi, neg] = detail::golden_max([&](double phi) { return -eval(phi); }, (best_k - 1) * step,
                                               (best_k + 1) * step, 1e-10);
    out = {ProjectiveAngle{phi}, -neg};
    if (best < out.mean) out = {ProjectiveAngle{best_k * step}, best};
  }
  // Singular angles win ties, e.g. the plateau at 1 for orthogonal pure states.
  for (double phi : {pair.theta / 2.0, pi - pair.theta / 2.0}) {
    const double v = eval(phi);
    if (v <= out.mean) out = {ProjectiveAngle{phi}, v};
  }
  if (std::isinf(out.mean)) throw DomainError("no measurement angle distinguishes the states");
  return out;
}

/// Copies needed by the optimal fixed-size collective test, -ln(eps)/xi_Ch.
/// Infinite when the states coincide away from theta = 0.
inline double chernoff_copies(const QubitPair& pair, double eps) {
  pair.validate();
  detail::check_eps(eps);
  if (pair.theta == 0.0 && pair.r0 == pair.r1) throw DomainError("theta = 0 with equal purities: identical states");
  if (pair.r0 == pair.r1) {
    const double r = pair.r0;
    const double s2 = std::pow(std::sin(pair.theta / 2.0), 2);
    const double denom = std::log1p(-(1.0 - std::sqrt(1.0 - r * r)) * s2);
    if (denom == 0.0) return kInf;
    return std::max(1.0, std::log(eps) / denom);
  }
  const auto [rho, sigma] = make_qubit_pair(pair);
  const ExtendedReal xi = chernoff_exponent(rho, sigma);
  if (xi.is_infinite()) return 1.0;
  if (xi.value() <= 0.0) return kInf;
  return std::max(1.0, -std::log(eps) / xi.value());
}

/// Unambiguous discrimination of pure states with overlap s: inconclusive
/// probabilities c0 (under H0) and c1 = s^2/c0 (under H1).
struct UnambiguousSpec {
  double s = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;

  static UnambiguousSpec on_tradeoff(double s, double c0) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("overlap s must lie in [0,1]");
    if (!(c0 >= s * s && c0 <= 1.0)) {
      std::ostringstream os;
      os << "c0 = " << c0 << " outside [s^2, 1] = [" << s * s << ", 1]";
      throw DomainError(os.str());
    }
    const double c1 = s == 0.0 ? 0.0 : s * s / c0;
    return {s, c0, c1};
  }

  void validate() const {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("overlap s must lie in [0,1]");
    if (!(c0 >= 0.0 && c0 <= 1.0 && c1 >= 0.0 && c1 <= 1.0)) throw DomainError("c0, c1 must lie in [0,1]");
    if (c0 * c1 < s * s * (1.0 - 1e-12)) throw DomainError("c0 c1 < s^2 violates the unambiguous tradeoff");
  }
};

/// n_i = 1/(1 - c_i): geometric number of rounds until a conclusive outcome.
inline MeanSampleSizes unambiguous_mean_copies(const UnambiguousSpec& spec, double eta0 = 0.5) {
  spec.validate();
  check_prior(eta0);
  MeanSampleSizes m;
  m.n0 = spec.c0 >= 1.0 ? kInf : 1.0 / (1.0 - spec.c0);
  m.n1 = spec.c1 >= 1.0 ? kInf : 1.0 / (1.0 - spec.c1);
  m.bayes = eta0 * m.n0 + (1.0 - eta0) * m.n1;
  m.worst_case = std::max(m.n0, m.n1);
  return m;
}

inline UnambiguousSpec optimal_symmetric_unambiguous(double s) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("overlap s must lie in [0,1); s = 1 means identical states");
  return {s, s, s};
}

/// Overlap |<psi0|psi1>| of the pure pair at relative Bloch angle theta.
inline double pure_overlap(double theta) { return std::abs(std::cos(theta / 2.0)); }

}  // namespace seqtest
