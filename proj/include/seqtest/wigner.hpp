#pragma once

// Wigner small-d matrices d^j_{m m'}(theta) = <j m| exp(-i theta J_y) |j m'>.
// Spins are passed as twice_j; row and column k correspond to m = k - j.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "seqtest/errors.hpp"
#include "seqtest/states.hpp"

namespace seqtest {

namespace detail {

inline void check_wigner_args(int twice_j, double theta) {
  if (twice_j < 0) throw DomainError("spin must be nonnegative");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw DomainError("rotation angle must lie in [0, pi]");
}

// Column m' of d^j is the eigenvector of cos(theta) J_z + sin(theta) J_x with
// eigenvalue m'. Solved by the three-term recursion run from both ends toward
// the classically allowed centre, where the two branches are matched.
inline void wigner_column(int twice_j, double theta, int kp, RealMatrix& out) {
  const int n = twice_j + 1;
  const double j = 0.5 * twice_j;
  const double mp = kp - j;
  const double c = std::cos(theta);
  const double half_s = 0.5 * std::sin(theta);
  auto m_of = [j](int k) { return k - j; };
  // Coupling between rows k and k-1.
  auto coupling = [&](int k) {
    if (k <= 0 || k >= n) return 0.0;
    const double m = m_of(k);
    return half_s * std::sqrt((j + m) * (j - m + 1.0));
  };
  auto diag = [&](int k) { return m_of(k) * c - mp; };

  constexpr double kBig = 1e150;
  const int centre = std::clamp(static_cast<int>(std::lround(mp * c + j)), 0, n - 1);
  const int lo = std::max(0, centre - 1);
  const int hi = std::min(n - 1, centre + 1);

  std::vector<double> f(n, 0.0);
  f[0] = 1.0;
  for (int k = 0; k < hi; ++k) {
    const double prev = k > 0 ? coupling(k) * f[k - 1] : 0.0;
    f[k + 1] = -(diag(k) * f[k] + prev) / coupling(k + 1);
    if (std::abs(f[k + 1]) > kBig) {
      for (int i = 0; i <= k + 1; ++i) f[i] /= kBig;
    }
  }
  std::vector<double> w(n, 0.0);
  w[n - 1] = 1.0;
  for (int k = n - 1; k > lo; --k) {
    const double next = k + 1 < n ? coupling(k + 1) * w[k + 1] : 0.0;
    w[k - 1] = -(diag(k) * w[k] + next) / coupling(k);
    if (std::abs(w[k - 1]) > kBig) {
      for (int i = k - 1; i < n; ++i) w[i] /= kBig;
    }
  }
  double fw = 0.0;
  double ww = 0.0;
  for (int k = lo; k <= hi; ++k) {
    fw += f[k] * w[k];
    ww += w[k] * w[k];
  }
  const double scale = fw / ww;
  RealVector v(n);
  for (int k = 0; k < n; ++k) v(k) = k <= hi ? f[k] : scale * w[k];
  // Entries in the window come from both branches; average them.
  for (int k = lo; k <= hi; ++k) v(k) = 0.5 * (f[k] + scale * w[k]);
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("Wigner recursion failed to normalize");
  // d_{-j, m'} >= 0 for theta in [0, pi], and f[0] > 0 carries that sign.
  out.col(kp) = v / norm;
}

}  // namespace detail

/// Signed small-d matrix via the three-term recursion.
inline RealMatrix wigner_small_d(int twice_j, double theta) {
  detail::check_wigner_args(twice_j, theta);
  const int n = twice_j + 1;
  if (theta == 0.0) return RealMatrix::Identity(n, n);
  if (theta == std::numbers::pi) {
    // d_{m m'}(pi) = (-1)^(j - m') delta_{m, -m'}
    RealMatrix d = RealMatrix::Zero(n, n);
    for (int kp = 0; kp < n; ++kp) d(n - 1 - kp, kp) = ((twice_j - kp) % 2 == 0) ? 1.0 : -1.0;
    return d;
  }
  RealMatrix d(n, n);
  for (int kp = 0; kp < n; ++kp) detail::wigner_column(twice_j, theta, kp, d);
  return d;
}

/// Signed small-d matrix from the explicit factorial sum in 50-digit arithmetic.
/// Slow; kept as an independent check of wigner_small_d.
inline RealMatrix wigner_small_d_sum(int twice_j, double theta) {
  detail::check_wigner_args(twice_j, theta);
  using Big = boost::multiprecision::cpp_bin_float_50;
  const int n = twice_j + 1;
  std::vector<Big> fact(twice_j + 2);
  fact[0] = 1;
  for (int i = 1; i < static_cast<int>(fact.size()); ++i) fact[i] = fact[i - 1] * i;
  const Big half = Big(theta) / 2;
  const Big cs = boost::multiprecision::cos(half);
  const Big sn = boost::multiprecision::sin(half);
  RealMatrix d(n, n);
  // Integer offsets: row m = a - j, column m' = b - j, so j + m = a, j - m = 2j - a.
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int jpm = a, jmm = twice_j - a, jpmp = b, jmmp = twice_j - b;
      const Big pref = boost::multiprecision::sqrt(fact[jpm] * fact[jmm] * fact[jpmp] * fact[jmmp]);
      Big sum = 0;
      // d_{m m'} = sum_s (-1)^(m - m' + s) pref / ((j+m'-s)! s! (m-m'+s)! (j-m-s)!)
      //            cos^(2j+m'-m-2s) sin^(m-m'+2s)
      const int diff = a - b;  // m - m'
      for (int s = std::max(0, -diff); s <= std::min(jpmp, jmm); ++s) {
        const Big denom = fact[jpmp - s] * fact[s] * fact[diff + s] * fact[jmm - s];
        const int cexp = twice_j - diff - 2 * s;
        const int sexp = diff + 2 * s;
        Big term = pref / denom * boost::multiprecision::pow(cs, cexp) * boost::multiprecision::pow(sn, sexp);
        if ((diff + s) % 2 != 0) term = -term;
        sum += term;
      }
      d(a, b) = static_cast<double>(sum);
    }
  }
  return d;
}

/// |d^j_{m m'}|^2: doubly stochastic transition matrix between J_z eigenbases.
struct WignerRow {
  int twice_j = 0;
  double theta = 0.0;
  RealMatrix amplitudes_squared;
};

inline WignerRow wigner_row(int twice_j, double theta) {
  return {twice_j, theta, wigner_small_d(twice_j, theta).cwiseAbs2()};
}

}  // namespace seqtest
