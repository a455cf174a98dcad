#pragma once

// Exact linear-programming version of the continue-probability bound for
// commuting states. Both states are diagonal in a common basis, so an optimal
// POVM is diagonal and constant on type classes; the program becomes an LP
// over C(n+k-1, k-1) classes, solved by a rational simplex.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <vector>

#include "seqtest/divergences.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/sdp_bound.hpp"
#include "seqtest/sprt.hpp"

namespace seqtest {

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

// Every composition of n into k nonnegative parts.
inline void compositions(int n, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k - 1) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int c = 0; c <= n; ++c) {
    cur.push_back(c);
    compositions(n - c, k, cur, out);
    cur.pop_back();
  }
}

inline Rational exact(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite LP coefficient");
  return Rational(v);
}

/// max c^T x  s.t.  G x <= h, x >= 0, with h >= 0 (the origin is feasible).
/// Dense tableau, Bland's rule.
inline Rational simplex_max(const std::vector<std::vector<Rational>>& G, const std::vector<Rational>& h,
                            const std::vector<Rational>& c) {
  const std::size_t rows = G.size();
  const std::size_t nvar = c.size();
  const std::size_t cols = nvar + rows;
  std::vector<std::vector<Rational>> tab(rows, std::vector<Rational>(cols + 1));
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (h[r] < 0) throw DomainError("simplex: infeasible origin");
    for (std::size_t j = 0; j < nvar; ++j) tab[r][j] = G[r][j];
    tab[r][nvar + r] = 1;
    tab[r][cols] = h[r];
    basis[r] = nvar + r;
  }
  // Reduced costs z_j - c_j; optimal when all >= 0.
  std::vector<Rational> red(cols + 1);
  for (std::size_t j = 0; j < nvar; ++j) red[j] = -c[j];
  for (int guard = 0; guard < 100000; ++guard) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (red[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) return red[cols];
    std::size_t leave = rows;
    Rational best;
    for (std::size_t r = 0; r < rows; ++r) {
      if (tab[r][enter] > 0) {
        const Rational ratio = tab[r][cols] / tab[r][enter];
        if (leave == rows || ratio < best || (ratio == best && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == rows) throw NumericalError("simplex: unbounded LP");
    const Rational piv = tab[leave][enter];
    for (auto& v : tab[leave]) v /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave || tab[r][enter] == 0) continue;
      const Rational f = tab[r][enter];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (tab[leave][j] != 0) tab[r][j] -= f * tab[leave][j];
      }
    }
    if (red[enter] != 0) {
      const Rational f = red[enter];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (tab[leave][j] != 0) red[j] -= f * tab[leave][j];
      }
    }
    basis[leave] = enter;
  }
  throw NumericalError("simplex: pivot limit reached");
}

}  // namespace detail

/// Continue-probability bound for commuting states with spectra p (rho) and
/// q (sigma), exact up to the double-precision inputs.
inline double lp_oracle_commuting(const OutcomeDistribution& p, const OutcomeDistribution& q, int n,
                                  const ErrorSpec& spec, double eta0 = 0.5, Hypothesis hyp = Hypothesis::kNull) {
  if (p.size() != q.size()) throw ShapeError("lp_oracle_commuting: spectra differ in length");
  if (n < 1) throw DomainError("copy number n must be positive");
  const SprtThresholds t = thresholds_from_errors(spec, eta0);
  const int k = static_cast<int>(p.size());
  std::vector<std::vector<int>> types;
  std::vector<int> cur;
  detail::compositions(n, k, cur, types);
  const std::size_t T = types.size();

  std::vector<Rational> pe(k), qe(k);
  for (int x = 0; x < k; ++x) {
    pe[x] = detail::exact(p[x]);
    qe[x] = detail::exact(q[x]);
  }
  std::vector<boost::multiprecision::cpp_int> fact(n + 1);
  fact[0] = 1;
  for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
  std::vector<Rational> P(T), Q(T);
  for (std::size_t a = 0; a < T; ++a) {
    Rational mult = Rational(fact[n]);
    Rational pp = 1, qq = 1;
    for (int x = 0; x < k; ++x) {
      mult /= Rational(fact[types[a][x]]);
      for (int c = 0; c < types[a][x]; ++c) {
        pp *= pe[x];
        qq *= qe[x];
      }
    }
    P[a] = mult * pp;
    Q[a] = mult * qq;
  }
  const Rational A = detail::exact(t.A);
  const Rational B = detail::exact(t.B);

  // Variables: e0_a (index a), e1_a (index T + a).
  std::vector<std::vector<Rational>> G(T + 2, std::vector<Rational>(2 * T));
  std::vector<Rational> h(T + 2);
  for (std::size_t a = 0; a < T; ++a) {
    G[a][a] = 1;
    G[a][T + a] = 1;
    h[a] = 1;
    G[T][T + a] = A * P[a] - Q[a];  // tr E1 (sigma - A rho) >= 0
    G[T + 1][a] = Q[a] - B * P[a];  // B tr E0 (rho - sigma/B) >= 0
  }
  std::vector<Rational> c(2 * T);
  for (std::size_t a = 0; a < T; ++a) {
    c[a] = hyp == Hypothesis::kNull ? P[a] : Q[a];
    c[T + a] = c[a];
  }
  const Rational stop = detail::simplex_max(G, h, c);
  return static_cast<double>(Rational(1) - stop);
}

}  // namespace seqtest
