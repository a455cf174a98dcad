#pragma once

// Wald sequential probability ratio test: thresholds, error rates, mean
// stopping times from Wald's identity, and the quantum lower bound on the
// mean number of copies. All logarithms are natural.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "seqtest/divergences.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/states.hpp"

namespace seqtest {

enum class ErrorMode { kStrong, kWeakAsymmetric, kSymmetric };

inline std::string to_string(ErrorMode m) {
  switch (m) {
    case ErrorMode::kStrong: return "strong";
    case ErrorMode::kWeakAsymmetric: return "weak-asymmetric";
    case ErrorMode::kSymmetric: return "symmetric";
  }
  return "?";
}

inline ErrorMode parse_error_mode(const std::string& s) {
  if (s == "strong") return ErrorMode::kStrong;
  if (s == "weak-asymmetric" || s == "weak") return ErrorMode::kWeakAsymmetric;
  if (s == "symmetric") return ErrorMode::kSymmetric;
  throw ValidationError("unknown error mode '" + s + "' (expected strong, weak-asymmetric or symmetric)");
}

/// Error requirements. Strong: posterior errors eps0 (deciding H0 wrongly) and
/// eps1. Weak-asymmetric: type I/II rates alpha, beta. Symmetric: a single
/// mean error applied to both types.
struct ErrorSpec {
  ErrorMode mode = ErrorMode::kStrong;
  double eps0 = 0.0;
  double eps1 = 0.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> mean_eps;

  static ErrorSpec strong(double eps0, double eps1) {
    ErrorSpec s{ErrorMode::kStrong, eps0, eps1, {}, {}, {}};
    s.validate();
    return s;
  }
  static ErrorSpec weak(double alpha, double beta) {
    ErrorSpec s{ErrorMode::kWeakAsymmetric, beta, alpha, alpha, beta, {}};
    s.validate();
    return s;
  }
  static ErrorSpec symmetric(double eps) {
    ErrorSpec s{ErrorMode::kSymmetric, eps, eps, {}, {}, eps};
    s.validate();
    return s;
  }

  void validate() const {
    auto unit = [](double v, const char* name) {
      if (!(v > 0.0 && v < 1.0)) {
        std::ostringstream os;
        os << "error field '" << name << "' = " << v << " must lie in (0,1)";
        throw DomainError(os.str());
      }
    };
    switch (mode) {
      case ErrorMode::kStrong:
        unit(eps0, "eps0");
        unit(eps1, "eps1");
        if (eps0 + eps1 >= 1.0) throw DomainError("eps0 + eps1 >= 1: thresholds cross");
        break;
      case ErrorMode::kWeakAsymmetric:
        if (!alpha || !beta) throw ValidationError("weak-asymmetric mode needs alpha and beta");
        unit(*alpha, "alpha");
        unit(*beta, "beta");
        if (*alpha + *beta >= 1.0) throw DomainError("alpha + beta >= 1: thresholds cross");
        break;
      case ErrorMode::kSymmetric:
        if (!mean_eps) throw ValidationError("symmetric mode needs mean_eps");
        unit(*mean_eps, "mean_eps");
        if (*mean_eps >= 0.5) throw DomainError("mean_eps >= 1/2: thresholds cross");
        break;
    }
  }

  // Type I/II rates targeted in the frequentist modes.
  std::pair<double, double> rates() const {
    if (mode == ErrorMode::kWeakAsymmetric) return {*alpha, *beta};
    if (mode == ErrorMode::kSymmetric) return {*mean_eps, *mean_eps};
    throw DomainError("rates() is defined only for weak-asymmetric and symmetric modes");
  }
};

/// Continue sampling while b < Z_n < a, Z_n = sum ln(q(x)/p(x)).
struct SprtThresholds {
  double a = 0.0;
  double b = 0.0;
  double A = 1.0;
  double B = 1.0;
  double eta0 = 0.5;
};

inline void check_prior(double eta0) {
  if (!(eta0 > 0.0 && eta0 < 1.0)) {
    std::ostringstream os;
    os << "prior eta0 = " << eta0 << " must lie in (0,1)";
    throw DomainError(os.str());
  }
}

inline SprtThresholds make_thresholds(double A, double B, double eta0) {
  if (!(A > 1.0) || !(B > 0.0 && B < 1.0)) {
    std::ostringstream os;
    os << "thresholds need A > 1 > B > 0, got A = " << A << ", B = " << B;
    throw DomainError(os.str());
  }
  return {std::log(A), std::log(B), A, B, eta0};
}

/// Strong mode: A = (eta0/eta1)(1-eps1)/eps1, B = (eta0/eta1) eps0/(1-eps0).
/// Frequentist modes use Wald's choice A = (1-beta)/alpha, B = beta/(1-alpha).
inline SprtThresholds thresholds_from_errors(const ErrorSpec& spec, double eta0 = 0.5) {
  spec.validate();
  check_prior(eta0);
  if (spec.mode == ErrorMode::kStrong) {
    const double odds = eta0 / (1.0 - eta0);
    const double A = odds * (1.0 - spec.eps1) / spec.eps1;
    const double B = odds * spec.eps0 / (1.0 - spec.eps0);
    if (!(A > 1.0 && B < 1.0)) {
      std::ostringstream os;
      os << "prior " << eta0 << " with eps0 = " << spec.eps0 << ", eps1 = " << spec.eps1
         << " leaves no continuation region (A = " << A << ", B = " << B << ")";
      throw DomainError(os.str());
    }
    return make_thresholds(A, B, eta0);
  }
  const auto [alpha, beta] = spec.rates();
  return make_thresholds((1.0 - beta) / alpha, beta / (1.0 - alpha), eta0);
}

/// Type I/II rates implied by the thresholds, neglecting overshoot.
inline std::pair<double, double> errors_from_thresholds(const SprtThresholds& t) {
  if (!(t.A > 1.0) || !(t.B < 1.0) || !(t.B > 0.0)) throw DomainError("errors_from_thresholds needs A > 1 > B > 0");
  const double alpha = (1.0 - t.B) / (t.A - t.B);
  const double beta = t.B * (t.A - 1.0) / (t.A - t.B);
  return {alpha, beta};
}

/// Mean walker position at stopping under H0 (z0) and H1 (z1).
inline std::pair<double, double> wald_mean_positions(const SprtThresholds& t, double alpha, double beta) {
  return {t.a * alpha + t.b * (1.0 - alpha), t.a * (1.0 - beta) + t.b * beta};
}

struct MeanSampleSizes {
  double n0 = 1.0;
  double n1 = 1.0;
  double bayes = 1.0;
  double worst_case = 1.0;
  // The value is only known to be O(1); reported as 1.
  bool n0_order_one = false;
  bool n1_order_one = false;
  // Set when O(1) corrections were dropped.
  bool leading_order = false;
  std::vector<std::string> warnings;

  bool n1_infinite() const { return std::isinf(n1); }
};

namespace detail {

inline MeanSampleSizes finish_means(double n0, double n1, double eta0, std::vector<std::string> warnings) {
  MeanSampleSizes m;
  m.warnings = std::move(warnings);
  auto floor_one = [&](double v, const char* name) {
    if (v < 1.0) {
      m.warnings.push_back(std::string(name) + " below one copy; floored at 1");
      return 1.0;
    }
    return v;
  };
  m.n0 = floor_one(n0, "n0");
  m.n1 = floor_one(n1, "n1");
  m.bayes = eta0 * m.n0 + (1.0 - eta0) * m.n1;
  m.worst_case = std::max(m.n0, m.n1);
  return m;
}

inline double max_abs_step(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  double worst = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0 && q[x] <= 0.0) continue;
    if (p[x] <= 0.0 || q[x] <= 0.0) return kInf;
    worst = std::max(worst, std::abs(std::log(q[x] / p[x])));
  }
  return worst;
}

inline void check_small_errors(const ErrorSpec& spec, std::vector<std::string>& warnings) {
  const bool large = spec.mode == ErrorMode::kStrong ? (spec.eps0 >= 0.05 || spec.eps1 >= 0.05)
                                                     : (spec.rates().first >= 0.05 || spec.rates().second >= 0.05);
  if (large) warnings.push_back("error bound >= 0.05: outside the asymptotic small-error regime");
}

}  // namespace detail

/// Wald-identity means n0 = -z0/D(p||q), n1 = z1/D(q||p), no-overshoot approximation.
inline MeanSampleSizes mean_copies_classical(const OutcomeDistribution& p, const OutcomeDistribution& q,
                                             const ErrorSpec& spec, double eta0 = 0.5) {
  const ExtendedReal d_pq = classical_kl(p, q);
  const ExtendedReal d_qp = classical_kl(q, p);
  if (d_pq.value() <= 0.0 || d_qp.value() <= 0.0) {
    throw DomainError("identical outcome distributions: zero drift, infinite walk");
  }
  const SprtThresholds t = thresholds_from_errors(spec, eta0);
  const auto [alpha, beta] = errors_from_thresholds(t);
  const auto [z0, z1] = wald_mean_positions(t, alpha, beta);
  const double n0 = d_pq.is_infinite() ? 1.0 : -z0 / d_pq.value();
  const double n1 = d_qp.is_infinite() ? 1.0 : z1 / d_qp.value();

  std::vector<std::string> warnings{"no-overshoot approximation"};
  if (std::min(n0, n1) < 5.0) warnings.push_back("overshoot: predicted mean below 5 steps");
  if (detail::max_abs_step(p, q) > t.a / 4.0) warnings.push_back("overshoot: single-step increment exceeds a/4");
  MeanSampleSizes m = detail::finish_means(n0, n1, eta0, std::move(warnings));
  m.n0_order_one = d_pq.is_infinite();
  m.n1_order_one = d_qp.is_infinite();
  return m;
}

/// Small-error limits n0 = -ln(eps0)/D(p||q), n1 = -ln(eps1)/D(q||p); the
/// weak mode uses -(1-alpha) ln(beta) and flags n1 as O(1) when alpha is not small.
inline MeanSampleSizes asymptotic_mean_copies(const OutcomeDistribution& p, const OutcomeDistribution& q,
                                              const ErrorSpec& spec, double eta0 = 0.5) {
  spec.validate();
  check_prior(eta0);
  const ExtendedReal d_pq = classical_kl(p, q);
  const ExtendedReal d_qp = classical_kl(q, p);
  if (d_pq.value() <= 0.0 || d_qp.value() <= 0.0) {
    throw DomainError("identical outcome distributions: zero drift, infinite walk");
  }
  std::vector<std::string> warnings;
  detail::check_small_errors(spec, warnings);
  double num0 = 0.0;
  double num1 = 0.0;
  bool n1_finite_order = false;
  if (spec.mode == ErrorMode::kStrong) {
    num0 = -std::log(spec.eps0);
    num1 = -std::log(spec.eps1);
  } else {
    const auto [alpha, beta] = spec.rates();
    num0 = -(1.0 - alpha) * std::log(beta);
    num1 = -(1.0 - beta) * std::log(alpha);
    n1_finite_order = alpha >= 0.05;
  }
  const double n0 = d_pq.is_infinite() ? 1.0 : num0 / d_pq.value();
  const double n1 = (d_qp.is_infinite() || n1_finite_order) ? 1.0 : num1 / d_qp.value();
  MeanSampleSizes m = detail::finish_means(n0, n1, eta0, std::move(warnings));
  m.n0_order_one = d_pq.is_infinite();
  m.n1_order_one = d_qp.is_infinite() || n1_finite_order;
  m.leading_order = true;
  return m;
}

/// Leading-order lower bound on the mean copies of any sequential strategy:
/// n0 >= -ln(eps0)(1 - 1/A)/D(rho||sigma), n1 >= -ln(eps1)(1 - B)/D(sigma||rho).
inline MeanSampleSizes ultimate_lower_bound(const DensityMatrix& rho, const DensityMatrix& sigma,
                                            const ErrorSpec& spec, double eta0 = 0.5) {
  spec.validate();
  check_prior(eta0);
  const ExtendedReal d01 = quantum_relative_entropy(rho, sigma);
  const ExtendedReal d10 = quantum_relative_entropy(sigma, rho);
  if (d01.value() <= 0.0 && d10.value() <= 0.0) throw DomainError("identical states: both divergences vanish");
  std::vector<std::string> warnings;
  detail::check_small_errors(spec, warnings);
  double num0 = 0.0;
  double num1 = 0.0;
  if (spec.mode == ErrorMode::kStrong) {
    const SprtThresholds t = thresholds_from_errors(spec, eta0);
    num0 = -std::log(spec.eps0) * (1.0 - 1.0 / t.A);
    num1 = -std::log(spec.eps1) * (1.0 - t.B);
  } else {
    const auto [alpha, beta] = spec.rates();
    num0 = -(1.0 - alpha) * std::log(beta);
    num1 = -(1.0 - beta) * std::log(alpha);
  }
  const double n0 = d01.is_infinite() ? 1.0 : num0 / d01.value();
  const double n1 = d10.is_infinite() ? 1.0 : num1 / d10.value();
  MeanSampleSizes m = detail::finish_means(n0, n1, eta0, std::move(warnings));
  m.n0_order_one = d01.is_infinite();
  m.n1_order_one = d10.is_infinite();
  m.leading_order = true;
  return m;
}

}  // namespace seqtest
