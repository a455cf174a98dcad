#pragma once

// Distinguishability measures in nats: classical and quantum relative
// entropies, sandwiched Renyi divergences, the Chernoff exponent, the
// strong-converse exponent kappa_n and the pinching machinery used to bound
// the measured relative entropy in arbitrary dimension.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "seqtest/errors.hpp"
#include "seqtest/states.hpp"

namespace seqtest {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSupportTol = 1e-10;

/// A nonnegative real in nats or +infinity.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : v_(v) {}  // NOLINT: implicit by intent

  static constexpr ExtendedReal infinity() { return ExtendedReal(kInf); }

  constexpr double value() const { return v_; }
  bool is_infinite() const { return std::isinf(v_) && v_ > 0; }
  bool is_finite() const { return std::isfinite(v_); }

 private:
  double v_ = 0.0;
};

/// Finite probability vector, length >= 2, entries in [0,1] summing to 1.
class OutcomeDistribution {
 public:
  OutcomeDistribution(std::vector<double> probs) : p_(std::move(probs)) { validate(); }  // NOLINT
  OutcomeDistribution(std::initializer_list<double> probs) : p_(probs) { validate(); }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

  bool operator==(const OutcomeDistribution&) const = default;

 private:
  void validate() const {
    if (p_.size() < 2) throw ValidationError("outcome distribution needs at least two outcomes");
    double total = 0.0;
    for (double x : p_) {
      if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << "probability " << x << " outside [0,1]";
        throw ValidationError(os.str());
      }
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "probabilities sum to " << total << ", not 1";
      throw ValidationError(os.str());
    }
  }

  std::vector<double> p_;
};

/// D(q||p) = sum_x q(x) ln(q(x)/p(x)), with 0 ln 0 = 0.
inline ExtendedReal classical_kl(const OutcomeDistribution& q, const OutcomeDistribution& p) {
  if (q.size() != p.size()) throw ShapeError("classical_kl: distributions differ in length");
  double d = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] <= 0.0) continue;
    if (p[x] <= 0.0) return ExtendedReal::infinity();
    d += q[x] * std::log(q[x] / p[x]);
  }
  return std::max(d, 0.0);
}

namespace detail {

inline void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw ShapeError("states have different dimensions");
}

// ||P_ker(sigma) rho P_ker(sigma)|| < tol, kernel = eigenvalues below tol.
inline bool support_contained(const DensityMatrix& rho, const Spectrum& sigma_spec) {
  const Eigen::Index d = sigma_spec.eigenvalues.size();
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (sigma_spec.eigenvalues(k) < kSupportTol) kernel.push_back(k);
  }
  if (kernel.empty()) return true;
  ComplexMatrix basis(d, static_cast<Eigen::Index>(kernel.size()));
  for (std::size_t i = 0; i < kernel.size(); ++i) basis.col(i) = sigma_spec.eigenvectors.col(kernel[i]);
  const ComplexMatrix compressed = basis.adjoint() * rho.matrix() * basis;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(compressed, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff() < kSupportTol;
}

// tr(rho ln X) given the spectrum of X; -inf when rho has weight on ker X.
inline double trace_rho_log(const DensityMatrix& rho, const Spectrum& x) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.eigenvalues.size(); ++k) {
    const ComplexVector v = x.eigenvectors.col(k);
    const double w = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    if (x.eigenvalues(k) < kSupportTol) {
      if (w > kSupportTol) return -kInf;
      continue;
    }
    acc += w * std::log(x.eigenvalues(k));
  }
  return acc;
}

inline double neg_entropy(const Spectrum& s) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    const double l = s.eigenvalues(k);
    if (l > 0.0) acc += l * std::log(l);
  }
  return acc;
}

// f applied to the support eigenvalues (>= tol); kernel maps to 0.
inline ComplexMatrix support_function(const Spectrum& s, const std::function<double(double)>& f,
                                      double tol = kSupportTol) {
  RealVector mapped(s.eigenvalues.size());
  for (Eigen::Index k = 0; k < mapped.size(); ++k) {
    mapped(k) = s.eigenvalues(k) >= tol ? f(s.eigenvalues(k)) : 0.0;
  }
  return s.eigenvectors * mapped.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (lo + hi);
  const double fm = f(xm);
  // The bracket endpoints are candidates too when the optimum sits on them.
  std::pair<double, double> best{xm, fm};
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > best.second) best = {x, fx};
  }
  return best;
}

}  // namespace detail

/// D(rho||sigma) = tr rho (ln rho - ln sigma); +inf when supp(rho) is not in supp(sigma).
inline ExtendedReal quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_same_dim(rho, sigma);
  const Spectrum sr = eigendecompose(rho);
  const Spectrum ss = eigendecompose(sigma);
  if (!detail::support_contained(rho, ss)) return ExtendedReal::infinity();
  const double cross = detail::trace_rho_log(rho, ss);
  if (std::isinf(cross)) return ExtendedReal::infinity();
  return std::max(detail::neg_entropy(sr) - cross, 0.0);
}

/// Sandwiched Renyi relative entropy of order s > 1.
inline ExtendedReal sandwiched_renyi(const DensityMatrix& rho, const DensityMatrix& sigma, double s) {
  if (!(s > 1.0)) {
    std::ostringstream os;
    os << "sandwiched_renyi requires s > 1, got " << s;
    throw DomainError(os.str());
  }
  detail::require_same_dim(rho, sigma);
  const Spectrum ss = eigendecompose(sigma);
  if (!detail::support_contained(rho, ss)) return ExtendedReal::infinity();
  const double gamma = (1.0 - s) / (2.0 * s);
  const ComplexMatrix sp = detail::support_function(ss, [gamma](double x) { return std::pow(x, gamma); });
  const ComplexMatrix inner = sp * rho.matrix() * sp;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  // ln sum_k m_k^s via log-sum-exp; large s overflows otherwise.
  std::vector<double> logs;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double m = es.eigenvalues()(k);
    if (m > 0.0) logs.push_back(s * std::log(m));
  }
  if (logs.empty()) return ExtendedReal::infinity();
  const double mx = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - mx);
  const double log_q = mx + std::log(acc);
  return std::max(log_q / (s - 1.0), 0.0);
}

/// xi_Ch = -min_{s in [0,1]} ln tr(rho^(1-s) sigma^s).
inline ExtendedReal chernoff_exponent(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_same_dim(rho, sigma);
  const Spectrum sr = eigendecompose(rho);
  const Spectrum ss = eigendecompose(sigma);
  const RealMatrix overlap = (sr.eigenvectors.adjoint() * ss.eigenvectors).cwiseAbs2();
  // tr(rho^(1-s) sigma^s) with powers taken on the supports (0^t = 0).
  auto trace_at = [&](double s) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < overlap.rows(); ++i) {
      const double li = sr.eigenvalues(i);
      if (li < kSupportTol) continue;
      for (Eigen::Index k = 0; k < overlap.cols(); ++k) {
        const double mk = ss.eigenvalues(k);
        if (mk < kSupportTol) continue;
        acc += std::pow(li, 1.0 - s) * std::pow(mk, s) * overlap(i, k);
      }
    }
    return acc;
  };
  // Orthogonal supports leave only round-off in the overlap.
  if (trace_at(0.5) <= 64.0 * std::numeric_limits<double>::epsilon()) return ExtendedReal::infinity();
  const auto [s_opt, neg_log] = detail::golden_max([&](double s) { return -std::log(trace_at(s)); }, 0.0, 1.0, 1e-9);
  (void)s_opt;
  return std::max(neg_log, 0.0);
}

struct KappaResult {
  double kappa;
  double s_opt;
  double xi_n;
  double n_star;
};

/// Strong-converse exponent kappa_n = sup_{s>1} ((s-1)/s) (xi_n - D~_s)/xi_n with
/// xi_n = -ln(eps)/n, valid below the critical copy number n* = -ln(eps)/D.
inline KappaResult strong_converse_kappa_detail(const DensityMatrix& rho, const DensityMatrix& sigma, int n,
                                                double eps, double s_cap = 100.0) {
  if (n < 1) throw DomainError("copy number n must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  const ExtendedReal d = quantum_relative_entropy(rho, sigma);
  if (d.is_infinite()) throw DomainError("strong_converse_kappa: D(rho||sigma) is infinite");
  if (d.value() <= 0.0) throw DomainError("strong_converse_kappa: D(rho||sigma) is zero");
  const double n_star = -std::log(eps) / d.value();
  if (static_cast<double>(n) >= n_star) {
    std::ostringstream os;
    os << "beyond critical copy number: n = " << n << " >= n* = " << n_star;
    throw DomainError(os.str());
  }
  const double xi = -std::log(eps) / n;
  // Searched in u = (s-1)/s, where the objective u (xi - D~)/xi is concave.
  auto objective = [&](double u) {
    const double s = 1.0 / (1.0 - u);
    const ExtendedReal dt = sandwiched_renyi(rho, sigma, s);
    if (dt.is_infinite()) return -kInf;
    return u * (xi - dt.value()) / xi;
  };
  const double s_lo = 1.0 + 1e-6;
  const double u_lo = (s_lo - 1.0) / s_lo;
  const double u_hi = (s_cap - 1.0) / s_cap;
  const auto [u_opt, value] = detail::golden_max(objective, u_lo, u_hi, 1e-9);
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream os;
    os << "kappa_n evaluated to " << value << " outside (0,1); n is numerically at the critical copy number";
    throw NumericalError(os.str());
  }
  return {value, 1.0 / (1.0 - u_opt), xi, n_star};
}

inline double strong_converse_kappa(const DensityMatrix& rho, const DensityMatrix& sigma, int n, double eps,
                                    double s_cap = 100.0) {
  return strong_converse_kappa_detail(rho, sigma, n, eps, s_cap).kappa;
}

/// sum_j E_j sigma E_j over a complete set of orthogonal projectors.
inline DensityMatrix pinch(const DensityMatrix& sigma, const std::vector<ComplexMatrix>& projectors) {
  if (projectors.empty()) throw ValidationError("pinch: empty projector set");
  const Eigen::Index d = sigma.dim();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const ComplexMatrix& p = projectors[i];
    if (p.rows() != d || p.cols() != d) throw ShapeError("pinch: projector dimension mismatch");
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-10 || (p * p - p).cwiseAbs().maxCoeff() > 1e-10) {
      throw ValidationError("pinch: element is not an orthogonal projector");
    }
    for (std::size_t k = i + 1; k < projectors.size(); ++k) {
      if ((p * projectors[k]).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("pinch: projectors are not mutually orthogonal");
      }
    }
    total += p;
  }
  if ((total - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("pinch: projectors do not sum to the identity");
  }
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& p : projectors) out += p * sigma.matrix() * p;
  return DensityMatrix::from(out);
}

inline std::vector<ComplexMatrix> rank_one_eigenprojectors(const DensityMatrix& state) {
  const Spectrum s = eigendecompose(state);
  std::vector<ComplexMatrix> out;
  for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) {
    out.push_back(s.eigenvectors.col(k) * s.eigenvectors.col(k).adjoint());
  }
  return out;
}

struct PinchingDecomposition {
  ExtendedReal relative_entropy;          // D(rho||sigma)
  ExtendedReal pinched_relative_entropy;  // D(E_F(rho)||E_F(sigma))
  double log_correction;                  // tr rho (ln E_F(sigma) - ln sigma); may be +-inf

  double residual() const {
    return relative_entropy.value() - pinched_relative_entropy.value() - log_correction;
  }
};

/// Both sides of D(rho||sigma) = D(E_F(rho)||E_F(sigma)) + tr rho(ln E_F(sigma) - ln sigma),
/// F the rank-one eigenprojectors of `eigenbasis_of` (which must leave rho invariant).
inline PinchingDecomposition pinching_decomposition_residual(const DensityMatrix& rho, const DensityMatrix& sigma,
                                                             const DensityMatrix& eigenbasis_of) {
  detail::require_same_dim(rho, sigma);
  detail::require_same_dim(rho, eigenbasis_of);
  const auto projectors = rank_one_eigenprojectors(eigenbasis_of);
  const DensityMatrix pinched_rho = pinch(rho, projectors);
  if ((pinched_rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("pinching_decomposition_residual: F does not leave rho invariant");
  }
  const DensityMatrix pinched_sigma = pinch(sigma, projectors);
  PinchingDecomposition out{quantum_relative_entropy(rho, sigma), quantum_relative_entropy(pinched_rho, pinched_sigma),
                            0.0};
  const double with_pinch = detail::trace_rho_log(rho, eigendecompose(pinched_sigma));
  const double plain = detail::trace_rho_log(rho, eigendecompose(sigma));
  if (std::isinf(plain) && std::isinf(with_pinch)) {
    out.log_correction = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.log_correction = with_pinch - plain;
  }
  return out;
}

/// max_i -ln lambda_min(sigma_i): the generous bound on the measured-entropy overhead.
inline ExtendedReal omega_upper_bound(const std::vector<DensityMatrix>& sigma_blocks) {
  if (sigma_blocks.empty()) throw ValidationError("omega_upper_bound: no blocks");
  double worst = 0.0;
  for (const auto& block : sigma_blocks) {
    const Spectrum s = eigendecompose(block);
    const double lmin = s.eigenvalues.minCoeff();
    if (lmin <= 0.0) return ExtendedReal::infinity();
    worst = std::max(worst, -std::log(lmin));
  }
  return worst;
}

}  // namespace seqtest
