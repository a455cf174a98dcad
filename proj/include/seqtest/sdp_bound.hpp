#pragma once

// Lower bound on the continue probability of any sequential strategy that
// meets the error thresholds after n copies: the two-sided Neyman-Pearson
// semidefinite program
//
//   min tr(E2 rho_nu^n)  s.t.  E_i >= 0, E0 + E1 + E2 = 1,
//                              tr[E1 (sigma^n - A rho^n)] >= 0,
//                              tr[E0 (rho^n - sigma^n / B)] >= 0.
//
// For qubits the POVM is averaged over permutations, so it is block diagonal
// over total spin j with identity on the multiplicity spaces; each block is
// further restricted to the support of its data.

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "seqtest/divergences.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/schur_block.hpp"
#include "seqtest/sdp/solver.hpp"
#include "seqtest/sprt.hpp"
#include "seqtest/states.hpp"
#include "seqtest/wigner.hpp"

namespace seqtest {

inline constexpr int kDefaultMaxCopies = 100;
inline constexpr int kMaxDenseCopies = 6;

/// Copy-number budget for the SDP; SEQTEST_MAX_N overrides the default of 100.
inline int max_sdp_copies() {
  if (const char* env = std::getenv("SEQTEST_MAX_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 100000) return static_cast<int>(v);
    throw ValidationError(std::string("SEQTEST_MAX_N is not a positive integer: ") + env);
  }
  return kDefaultMaxCopies;
}

enum class Hypothesis { kNull = 0, kAlternative = 1 };

inline Hypothesis hypothesis_from_int(int h) {
  if (h == 0) return Hypothesis::kNull;
  if (h == 1) return Hypothesis::kAlternative;
  throw ValidationError("hypothesis must be 0 or 1");
}

/// One symmetry block: the restrictions of rho^n (R) and sigma^n (S), multiplicity included.
struct DataBlock {
  RealMatrix R;
  RealMatrix S;
};

struct ContinueBound {
  double value = 1.0;
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  int variable_dimension = 0;  // sum of kept block sizes
};

namespace detail {

inline void check_copies(int n, int cap) {
  if (n < 1) throw DomainError("copy number n must be positive");
  if (n > cap) {
    std::ostringstream os;
    os << "copy number " << n << " exceeds the SDP limit " << cap << " (raise SEQTEST_MAX_N)";
    throw ResourceError(os.str());
  }
}

// Keeps the eigendirections of R + S above drop_tol.
inline void push_truncated(std::vector<DataBlock>& out, const RealMatrix& R, const RealMatrix& S, double drop_tol) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(R + S);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) > drop_tol) keep.push_back(k);
  }
  if (keep.empty()) return;
  RealMatrix V(R.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t) V.col(t) = es.eigenvectors().col(keep[t]);
  RealMatrix r = V.transpose() * R * V;
  RealMatrix s = V.transpose() * S * V;
  out.push_back({0.5 * (r + r.transpose()), 0.5 * (s + s.transpose())});
}

inline RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Hermitian H -> (1/2)[[Re, -Im], [Im, Re]]: real, symmetric, same trace.
inline RealMatrix realify(const ComplexMatrix& h) {
  const Eigen::Index d = h.rows();
  RealMatrix out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = h.real();
  out.bottomRightCorner(d, d) = h.real();
  out.topRightCorner(d, d) = -h.imag();
  out.bottomLeftCorner(d, d) = h.imag();
  return 0.5 * out;
}

}  // namespace detail

/// Permutation-symmetric blocks of (rho^n, sigma^n) for a qubit pair in
/// sigma's eigenbasis, restricted to directions carrying weight above drop_tol.
inline std::vector<DataBlock> symmetric_blocks(const QubitPair& pair, int n, double drop_tol = 1e-15) {
  pair.validate();
  if (n < 1) throw DomainError("copy number n must be positive");
  const BlockBasis basis = block_basis(n);
  const auto lw_rho = detail::diagonal_log_weights(basis, pair.r0);
  const auto lw_sigma = detail::diagonal_log_weights(basis, pair.r1);
  std::vector<DataBlock> out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int dim = basis.twice_j[i] + 1;
    RealVector wr(dim), ws(dim);
    for (int k = 0; k < dim; ++k) {
      wr(k) = std::exp(lw_rho[i][k]);
      ws(k) = std::exp(lw_sigma[i][k]);
    }
    if (wr.sum() + ws.sum() <= drop_tol) continue;
    const RealMatrix d = wigner_small_d(basis.twice_j[i], pair.theta);
    const RealMatrix R = d * wr.asDiagonal() * d.transpose();
    const RealMatrix S = ws.asDiagonal();
    detail::push_truncated(out, R, S, drop_tol);
  }
  return out;
}

/// Assembles the conic program over the given blocks. Cones 3b, 3b+1, 3b+2
/// hold E0, E1, E2 on block b; the last cone holds the two constraint slacks.
inline sdp::Problem povm_program(const std::vector<DataBlock>& blocks, double A, double B, Hypothesis hyp) {
  if (!(A > 1.0) || !(B > 0.0 && B < 1.0)) throw DomainError("thresholds need A > 1 > B > 0");
  if (blocks.empty()) throw ValidationError("povm_program: no data blocks");
  sdp::Problem prob;
  const int nb = static_cast<int>(blocks.size());
  const int slack = 3 * nb;
  sdp::Constraint accept1{{}, {}, 0.0, true};
  sdp::Constraint accept0{{}, {}, 0.0, true};
  for (int b = 0; b < nb; ++b) {
    const DataBlock& blk = blocks[b];
    const int k = static_cast<int>(blk.R.rows());
    if (blk.R.cols() != k || blk.S.rows() != k || blk.S.cols() != k) throw ShapeError("data block is not square");
    for (int i = 0; i < 3; ++i) {
      prob.cones.push_back({sdp::ConeKind::kPsd, k});
      prob.objective.push_back(i == 2 ? (hyp == Hypothesis::kNull ? blk.R : blk.S) : RealMatrix::Zero(k, k));
    }
    for (int p = 0; p < k; ++p) {
      for (int q = p; q < k; ++q) {
        sdp::Constraint c;
        for (int i = 0; i < 3; ++i) c.sparse.push_back({3 * b + i, p, q, 1.0});
        c.rhs = p == q ? 1.0 : 0.0;
        prob.constraints.push_back(std::move(c));
      }
    }
    // Rescaled so the larger coefficient is O(1).
    accept1.dense.push_back({3 * b + 1, blk.S / A - blk.R});
    accept0.dense.push_back({3 * b, B * blk.R - blk.S});
  }
  prob.cones.push_back({sdp::ConeKind::kNonneg, 2});
  prob.objective.push_back(RealMatrix::Zero(2, 1));
  accept1.sparse.push_back({slack, 0, 0, -1.0});
  accept0.sparse.push_back({slack, 1, 1, -1.0});
  prob.constraints.push_back(std::move(accept1));
  prob.constraints.push_back(std::move(accept0));
  return prob;
}

inline ContinueBound solve_povm_program(const std::vector<DataBlock>& blocks, double A, double B, Hypothesis hyp) {
  const sdp::Problem prob = povm_program(blocks, A, B, hyp);
  sdp::Solution sol;
  try {
    sol = sdp::solve(prob);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("continue-probability SDP failed: ") + e.what());
  }
  ContinueBound out;
  out.value = std::clamp(sol.primal_objective, 0.0, 1.0);
  out.duality_gap = std::abs(sol.primal_objective - sol.dual_objective);
  out.primal_residual = sol.primal_residual;
  out.dual_residual = sol.dual_residual;
  out.iterations = sol.iterations;
  for (const auto& b : blocks) out.variable_dimension += static_cast<int>(b.R.rows());
  return out;
}

/// Block-structured SDP lower bound T~^n on the continue probability under `hyp`.
inline ContinueBound continue_lower_bound_detail(const QubitPair& pair, int n, const ErrorSpec& spec, double eta0,
                                                 Hypothesis hyp) {
  detail::check_copies(n, max_sdp_copies());
  const SprtThresholds t = thresholds_from_errors(spec, eta0);
  return solve_povm_program(symmetric_blocks(pair, n), t.A, t.B, hyp);
}

inline double continue_lower_bound(const QubitPair& pair, int n, const ErrorSpec& spec, double eta0 = 0.5,
                                   Hypothesis hyp = Hypothesis::kNull) {
  return continue_lower_bound_detail(pair, n, spec, eta0, hyp).value;
}

/// The same program on the full d^n-dimensional space, without symmetry reduction.
inline ContinueBound continue_lower_bound_dense(const DensityMatrix& rho, const DensityMatrix& sigma, int n,
                                                const ErrorSpec& spec, double eta0 = 0.5,
                                                Hypothesis hyp = Hypothesis::kNull) {
  if (rho.dim() != sigma.dim()) throw ShapeError("states have different dimensions");
  detail::check_copies(n, kMaxDenseCopies);
  const SprtThresholds t = thresholds_from_errors(spec, eta0);
  const bool real = rho.is_real() && sigma.is_real();
  auto lift = [&](const DensityMatrix& s) {
    ComplexMatrix acc = s.matrix();
    for (int k = 1; k < n; ++k) {
      ComplexMatrix next(acc.rows() * s.dim(), acc.cols() * s.dim());
      for (Eigen::Index i = 0; i < acc.rows(); ++i)
        for (Eigen::Index j = 0; j < acc.cols(); ++j)
          next.block(i * s.dim(), j * s.dim(), s.dim(), s.dim()) = acc(i, j) * s.matrix();
      acc = std::move(next);
    }
    return acc;
  };
  const ComplexMatrix rn = lift(rho);
  const ComplexMatrix sn = lift(sigma);
  std::vector<DataBlock> blocks;
  if (real) {
    blocks.push_back({rn.real(), sn.real()});
  } else {
    blocks.push_back({detail::realify(rn), detail::realify(sn)});
  }
  return solve_povm_program(blocks, t.A, t.B, hyp);
}

/// Critical copy number: -ln(eps0)(1 - 1/A)/D(rho||sigma) under H0 and
/// -ln(eps1)(1 - B)/D(sigma||rho) under H1; frequentist modes use (1-alpha) ln(beta).
inline double critical_copy_number(const DensityMatrix& rho, const DensityMatrix& sigma, const ErrorSpec& spec,
                                   double eta0, Hypothesis hyp) {
  const SprtThresholds t = thresholds_from_errors(spec, eta0);
  const bool null = hyp == Hypothesis::kNull;
  const ExtendedReal d = null ? quantum_relative_entropy(rho, sigma) : quantum_relative_entropy(sigma, rho);
  if (d.is_infinite()) return 0.0;
  if (d.value() <= 0.0) throw DomainError("identical states: critical copy number is infinite");
  double num = 0.0;
  if (spec.mode == ErrorMode::kStrong) {
    num = null ? -std::log(spec.eps0) * (1.0 - 1.0 / t.A) : -std::log(spec.eps1) * (1.0 - t.B);
  } else {
    const auto [alpha, beta] = spec.rates();
    num = null ? -(1.0 - alpha) * std::log(beta) : -(1.0 - beta) * std::log(alpha);
  }
  return num / d.value();
}

struct ContinueCurve {
  std::vector<int> n_values;
  std::vector<double> t_values;
  std::vector<ContinueBound> diagnostics;
  double n_star = 0.0;
  double bound_sum = 1.0;  // T^0 = 1 plus sum over 1 <= n <= floor(n*)
  std::vector<std::string> warnings;
};

/// T~^n for n = 1..n_max, the critical copy number and the truncated-sum bound.
inline ContinueCurve continue_curve(const QubitPair& pair, const ErrorSpec& spec, double eta0, Hypothesis hyp,
                                    int n_max) {
  detail::check_copies(n_max, max_sdp_copies());
  const auto [rho, sigma] = make_qubit_pair(pair);
  ContinueCurve curve;
  curve.n_star = critical_copy_number(rho, sigma, spec, eta0, hyp);
  const int last = static_cast<int>(std::floor(curve.n_star));
  if (n_max < last) {
    std::ostringstream os;
    os << "n_max = " << n_max << " is below n* = " << curve.n_star << "; bound_sum is truncated";
    curve.warnings.push_back(os.str());
  }
  for (int n = 1; n <= n_max; ++n) {
    ContinueBound b = continue_lower_bound_detail(pair, n, spec, eta0, hyp);
    curve.n_values.push_back(n);
    curve.t_values.push_back(b.value);
    curve.diagnostics.push_back(b);
    if (n <= last) curve.bound_sum += b.value;
  }
  return curve;
}

}  // namespace seqtest
