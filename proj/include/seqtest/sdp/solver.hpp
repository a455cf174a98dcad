#pragma once

// Primal-dual interior-point solver for real block-diagonal conic programs
//
//   min <C, X>  s.t.  <A_i, X> = b_i,  X in K,
//
// K a product of PSD cones and nonnegative orthants. Search direction HKM
// with Mehrotra predictor-corrector. Constraints flagged `coupling` border
// the Schur complement; the rest are grouped into independent components
// (constraints sharing a cone block), each factored densely.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "seqtest/errors.hpp"

namespace seqtest::sdp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class ConeKind { kPsd, kNonneg };

struct Cone {
  ConeKind kind = ConeKind::kPsd;
  int dim = 0;
};

/// Coefficient v at (row, col) and, when row != col, at (col, row) as well.
/// For nonnegative cones row == col indexes the coordinate.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Full symmetric coefficient on one block (a dim x 1 column for orthants).
struct DenseTerm {
  int block = 0;
  Mat coeff;
};

struct Constraint {
  std::vector<Entry> sparse;
  std::vector<DenseTerm> dense;
  double rhs = 0.0;
  bool coupling = false;
};

struct Problem {
  std::vector<Cone> cones;
  std::vector<Mat> objective;  // one per cone; dim x 1 for orthants
  std::vector<Constraint> constraints;
};

struct Options {
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iterations = 120;
};

struct Solution {
  std::vector<Mat> X;
  std::vector<Mat> Z;
  Vec y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // <X, Z>
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

namespace detail {

using Blocks = std::vector<Mat>;

inline double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

inline double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

// Restriction of one constraint to one block.
struct Piece {
  int constraint = 0;
  std::vector<std::pair<int, int>> idx;  // (row, col)
  std::vector<double> val;
  const Mat* dense = nullptr;
  double dense_scale = 1.0;
};

class Solver {
 public:
  Solver(const Problem& problem, const Options& options) : p_(problem), opt_(options) { setup(); }

  Solution run();

 private:
  void setup();
  Vec apply_all(const Blocks& m) const;
  Blocks adjoint(const Vec& y) const;
  void build_schur(const Blocks& X, const Blocks& W);
  Vec solve_schur(const Vec& h) const;
  double max_step(const Blocks& x, const Blocks& dx) const;

  const Problem& p_;
  Options opt_;
  int m_ = 0;
  std::vector<double> row_scale_;
  Vec b_;
  std::vector<std::vector<Piece>> by_block_;
  // Schur structure.
  std::vector<int> component_of_;  // per constraint; -1 for coupling
  std::vector<int> local_index_;   // position inside its component or border
  std::vector<std::vector<int>> components_;
  std::vector<int> border_;
  std::vector<Mat> m_comp_;
  std::vector<Mat> m_border_;  // per component: size_c x n_border
  Mat m_cc_;
  std::vector<Eigen::LDLT<Mat>> fact_;
  std::vector<Mat> v_comp_;  // M_comp^-1 M_border
  Eigen::FullPivLU<Mat> fact_cc_;
  int n_total_ = 0;
};

inline void Solver::setup() {
  m_ = static_cast<int>(p_.constraints.size());
  const int nb = static_cast<int>(p_.cones.size());
  if (static_cast<int>(p_.objective.size()) != nb) throw ShapeError("sdp: objective/cone count mismatch");
  for (int k = 0; k < nb; ++k) {
    const Cone& c = p_.cones[k];
    if (c.dim < 1) throw ShapeError("sdp: empty cone");
    const int cols = c.kind == ConeKind::kPsd ? c.dim : 1;
    if (p_.objective[k].rows() != c.dim || p_.objective[k].cols() != cols) {
      throw ShapeError("sdp: objective block has the wrong shape");
    }
    n_total_ += c.dim;
  }
  by_block_.assign(nb, {});
  row_scale_.assign(m_, 1.0);
  b_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const Constraint& con = p_.constraints[i];
    double norm2 = 0.0;
    std::vector<int> piece_of(nb, -1);
    auto piece = [&](int blk) -> Piece& {
      if (blk < 0 || blk >= nb) throw ShapeError("sdp: constraint references a missing block");
      if (piece_of[blk] < 0) {
        piece_of[blk] = static_cast<int>(by_block_[blk].size());
        by_block_[blk].push_back(Piece{i, {}, {}, nullptr, 1.0});
      }
      return by_block_[blk][piece_of[blk]];
    };
    for (const Entry& e : con.sparse) {
      const Cone& c = p_.cones[e.block];
      if (e.row < 0 || e.col < 0 || e.row >= c.dim || e.col >= c.dim) throw ShapeError("sdp: entry out of range");
      if (c.kind == ConeKind::kNonneg && e.row != e.col) throw ShapeError("sdp: off-diagonal entry on an orthant");
      Piece& pc = piece(e.block);
      pc.idx.emplace_back(std::min(e.row, e.col), std::max(e.row, e.col));
      pc.val.push_back(e.value);
      norm2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    }
    for (const DenseTerm& d : con.dense) {
      const Cone& c = p_.cones[d.block];
      const int cols = c.kind == ConeKind::kPsd ? c.dim : 1;
      if (d.coeff.rows() != c.dim || d.coeff.cols() != cols) throw ShapeError("sdp: dense term has the wrong shape");
      Piece& pc = piece(d.block);
      if (pc.dense != nullptr) throw ShapeError("sdp: two dense terms on one block");
      pc.dense = &d.coeff;
      norm2 += d.coeff.squaredNorm();
    }
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0)) throw ShapeError("sdp: constraint with no coefficients");
    row_scale_[i] = 1.0 / norm;
    b_(i) = con.rhs / norm;
  }
  for (auto& pieces : by_block_) {
    for (Piece& pc : pieces) {
      const double s = row_scale_[pc.constraint];
      for (double& v : pc.val) v *= s;
      pc.dense_scale = s;
    }
  }

  // Components of non-coupling constraints linked through shared blocks.
  std::vector<int> parent(nb);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> first_block(m_, -1);
  for (int k = 0; k < nb; ++k) {
    for (const Piece& pc : by_block_[k]) {
      if (p_.constraints[pc.constraint].coupling) continue;
      int& f = first_block[pc.constraint];
      if (f < 0) {
        f = k;
      } else {
        parent[find(k)] = find(f);
      }
    }
  }
  component_of_.assign(m_, -1);
  local_index_.assign(m_, -1);
  std::vector<int> comp_id(nb, -1);
  for (int i = 0; i < m_; ++i) {
    if (p_.constraints[i].coupling || first_block[i] < 0) {
      local_index_[i] = static_cast<int>(border_.size());
      border_.push_back(i);
      continue;
    }
    const int root = find(first_block[i]);
    if (comp_id[root] < 0) {
      comp_id[root] = static_cast<int>(components_.size());
      components_.emplace_back();
    }
    const int c = comp_id[root];
    component_of_[i] = c;
    local_index_[i] = static_cast<int>(components_[c].size());
    components_[c].push_back(i);
  }
}

inline Vec Solver::apply_all(const Blocks& m) const {
  Vec out = Vec::Zero(m_);
  for (std::size_t k = 0; k < by_block_.size(); ++k) {
    const Mat& mk = m[k];
    const bool psd = p_.cones[k].kind == ConeKind::kPsd;
    for (const Piece& pc : by_block_[k]) {
      double s = 0.0;
      for (std::size_t e = 0; e < pc.idx.size(); ++e) {
        const auto [r, c] = pc.idx[e];
        if (!psd) {
          s += pc.val[e] * mk(r, 0);
        } else if (r == c) {
          s += pc.val[e] * mk(r, r);
        } else {
          s += pc.val[e] * (mk(r, c) + mk(c, r));
        }
      }
      if (pc.dense != nullptr) s += pc.dense_scale * pc.dense->cwiseProduct(mk).sum();
      out(pc.constraint) += s;
    }
  }
  return out;
}

inline Blocks Solver::adjoint(const Vec& y) const {
  Blocks out;
  for (std::size_t k = 0; k < by_block_.size(); ++k) {
    const Cone& c = p_.cones[k];
    Mat mk = Mat::Zero(c.dim, c.kind == ConeKind::kPsd ? c.dim : 1);
    for (const Piece& pc : by_block_[k]) {
      const double yi = y(pc.constraint);
      for (std::size_t e = 0; e < pc.idx.size(); ++e) {
        const auto [r, col] = pc.idx[e];
        if (c.kind != ConeKind::kPsd) {
          mk(r, 0) += pc.val[e] * yi;
        } else {
          mk(r, col) += pc.val[e] * yi;
          if (r != col) mk(col, r) += pc.val[e] * yi;
        }
      }
      if (pc.dense != nullptr) mk += (pc.dense_scale * yi) * *pc.dense;
    }
    out.push_back(std::move(mk));
  }
  return out;
}

inline void Solver::build_schur(const Blocks& X, const Blocks& W) {
  const int nbd = static_cast<int>(border_.size());
  m_comp_.resize(components_.size());
  m_border_.resize(components_.size());
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const int sz = static_cast<int>(components_[c].size());
    m_comp_[c].setZero(sz, sz);
    m_border_[c].setZero(sz, nbd);
  }
  m_cc_.setZero(nbd, nbd);

  auto accumulate = [&](int i, int j, double v) {
    const int ci = component_of_[i];
    const int cj = component_of_[j];
    const int li = local_index_[i];
    const int lj = local_index_[j];
    if (ci >= 0 && cj >= 0) {
      m_comp_[ci](li, lj) += v;
      if (i != j) m_comp_[ci](lj, li) += v;
    } else if (ci >= 0) {
      m_border_[ci](li, lj) += v;
    } else if (cj >= 0) {
      m_border_[cj](lj, li) += v;
    } else {
      m_cc_(li, lj) += v;
      if (i != j) m_cc_(lj, li) += v;
    }
  };

  for (std::size_t k = 0; k < by_block_.size(); ++k) {
    const auto& pieces = by_block_[k];
    const Mat& x = X[k];
    const Mat& w = W[k];
    if (p_.cones[k].kind == ConeKind::kNonneg) {
      const Vec d = x.col(0).cwiseProduct(w.col(0));
      std::vector<Vec> full;
      for (const Piece& pc : pieces) {
        Vec a = Vec::Zero(p_.cones[k].dim);
        for (std::size_t e = 0; e < pc.idx.size(); ++e) a(pc.idx[e].first) += pc.val[e];
        if (pc.dense != nullptr) a += pc.dense_scale * pc.dense->col(0);
        full.push_back(std::move(a));
      }
      for (std::size_t a = 0; a < pieces.size(); ++a) {
        for (std::size_t b = a; b < pieces.size(); ++b) {
          accumulate(pieces[a].constraint, pieces[b].constraint, (full[a].cwiseProduct(d)).dot(full[b]));
        }
      }
      continue;
    }
    // G = X A W for pieces with a dense part.
    std::vector<Mat> g(pieces.size());
    for (std::size_t a = 0; a < pieces.size(); ++a) {
      const Piece& pc = pieces[a];
      if (pc.dense == nullptr) continue;
      Mat full = pc.dense_scale * *pc.dense;
      for (std::size_t e = 0; e < pc.idx.size(); ++e) {
        const auto [r, c] = pc.idx[e];
        full(r, c) += pc.val[e];
        if (r != c) full(c, r) += pc.val[e];
      }
      g[a] = x * full * w;
    }
    auto inner_with_g = [&](const Piece& pc, const Mat& gm) {
      double s = 0.0;
      for (std::size_t e = 0; e < pc.idx.size(); ++e) {
        const auto [r, c] = pc.idx[e];
        s += pc.val[e] * (r == c ? gm(r, r) : gm(r, c) + gm(c, r));
      }
      if (pc.dense != nullptr) s += pc.dense_scale * pc.dense->cwiseProduct(gm).sum();
      return s;
    };
    for (std::size_t a = 0; a < pieces.size(); ++a) {
      const Piece& pa = pieces[a];
      for (std::size_t b = a; b < pieces.size(); ++b) {
        const Piece& pb = pieces[b];
        double v = 0.0;
        if (pb.dense != nullptr) {
          v = inner_with_g(pa, g[b]);
        } else if (pa.dense != nullptr) {
          v = inner_with_g(pb, g[a]);
        } else {
          // tr(E_ab X E_cd W) = X(b,c) W(d,a) summed over the symmetric pairs.
          for (std::size_t e = 0; e < pa.idx.size(); ++e) {
            const auto [p, q] = pa.idx[e];
            for (std::size_t f = 0; f < pb.idx.size(); ++f) {
              const auto [r, s] = pb.idx[f];
              double t = x(q, r) * w(s, p);
              if (r != s) t += x(q, s) * w(r, p);
              if (p != q) {
                t += x(p, r) * w(s, q);
                if (r != s) t += x(p, s) * w(r, q);
              }
              v += pa.val[e] * pb.val[f] * t;
            }
          }
        }
        accumulate(pa.constraint, pb.constraint, v);
      }
    }
  }

  fact_.clear();
  v_comp_.clear();
  Mat schur = m_cc_;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    Mat& mc = m_comp_[c];
    const double jitter = 1e-15 * std::max(1.0, mc.diagonal().cwiseAbs().maxCoeff());
    mc.diagonal().array() += jitter;
    fact_.emplace_back(mc);
    if (fact_.back().info() != Eigen::Success) throw NumericalError("sdp: Schur complement factorization failed");
    v_comp_.push_back(fact_.back().solve(m_border_[c]));
    if (nbd > 0) schur -= m_border_[c].transpose() * v_comp_.back();
  }
  if (nbd > 0) fact_cc_.compute(schur);
}

inline Vec Solver::solve_schur(const Vec& h) const {
  const int nbd = static_cast<int>(border_.size());
  Vec out(m_);
  std::vector<Vec> u(components_.size());
  Vec rhs_c(nbd);
  for (int t = 0; t < nbd; ++t) rhs_c(t) = h(border_[t]);
  for (std::size_t c = 0; c < components_.size(); ++c) {
    Vec hc(components_[c].size());
    for (std::size_t t = 0; t < components_[c].size(); ++t) hc(t) = h(components_[c][t]);
    u[c] = fact_[c].solve(hc);
    if (nbd > 0) rhs_c -= m_border_[c].transpose() * u[c];
  }
  Vec yc = nbd > 0 ? Vec(fact_cc_.solve(rhs_c)) : Vec();
  for (int t = 0; t < nbd; ++t) out(border_[t]) = yc(t);
  for (std::size_t c = 0; c < components_.size(); ++c) {
    Vec yb = u[c];
    if (nbd > 0) yb -= v_comp_[c] * yc;
    for (std::size_t t = 0; t < components_[c].size(); ++t) out(components_[c][t]) = yb(t);
  }
  return out;
}

inline double Solver::max_step(const Blocks& x, const Blocks& dx) const {
  double alpha = 1e30;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (p_.cones[k].kind == ConeKind::kNonneg) {
      for (Eigen::Index r = 0; r < x[k].rows(); ++r) {
        if (dx[k](r, 0) < 0.0) alpha = std::min(alpha, -x[k](r, 0) / dx[k](r, 0));
      }
      continue;
    }
    Eigen::LLT<Mat> llt(x[k]);
    if (llt.info() != Eigen::Success) throw NumericalError("sdp: iterate lost positive definiteness");
    Mat t = llt.matrixL().solve(dx[k]);
    t = llt.matrixL().solve(t.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

inline Solution Solver::run() {
  const int nb = static_cast<int>(p_.cones.size());
  Blocks C = p_.objective;
  const double c_norm = frob(C);
  const double b_norm = b_.norm();

  Blocks X, Z;
  const double xi = std::max(10.0, std::sqrt(static_cast<double>(n_total_)));
  const double eta = std::max({10.0, std::sqrt(static_cast<double>(n_total_)), c_norm});
  for (const Cone& c : p_.cones) {
    if (c.kind == ConeKind::kPsd) {
      X.push_back(xi * Mat::Identity(c.dim, c.dim));
      Z.push_back(eta * Mat::Identity(c.dim, c.dim));
    } else {
      X.push_back(Mat::Constant(c.dim, 1, xi));
      Z.push_back(Mat::Constant(c.dim, 1, eta));
    }
  }
  Vec y = Vec::Zero(m_);

  auto inverse = [&](const Blocks& z) {
    Blocks w;
    for (int k = 0; k < nb; ++k) {
      if (p_.cones[k].kind == ConeKind::kNonneg) {
        w.push_back(z[k].cwiseInverse());
      } else {
        Eigen::LLT<Mat> llt(z[k]);
        if (llt.info() != Eigen::Success) throw NumericalError("sdp: dual slack lost positive definiteness");
        Mat inv = llt.solve(Mat::Identity(z[k].rows(), z[k].cols()));
        w.push_back(0.5 * (inv + inv.transpose()));
      }
    }
    return w;
  };
  // Block-wise product a*b*c (elementwise on orthants).
  auto triple = [&](const Blocks& a, const Blocks& b, const Blocks& c) {
    Blocks out;
    for (int k = 0; k < nb; ++k) {
      if (p_.cones[k].kind == ConeKind::kNonneg) {
        out.push_back(a[k].cwiseProduct(b[k]).cwiseProduct(c[k]));
      } else {
        out.push_back(a[k] * b[k] * c[k]);
      }
    }
    return out;
  };
  auto symmetrize = [&](Blocks& a) {
    for (int k = 0; k < nb; ++k) {
      if (p_.cones[k].kind == ConeKind::kPsd) a[k] = 0.5 * (a[k] + a[k].transpose()).eval();
    }
  };

  Solution sol;
  const double n_cone = static_cast<double>(n_total_);
  for (int iter = 0; iter <= opt_.max_iterations; ++iter) {
    const Vec rp = b_ - apply_all(X);
    Blocks Rd = C;
    {
      const Blocks aty = adjoint(y);
      for (int k = 0; k < nb; ++k) Rd[k] -= aty[k] + Z[k];
    }
    const double pobj = inner(C, X);
    const double dobj = b_.dot(y);
    const double xz = inner(X, Z);
    const double scale = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = frob(Rd) / (1.0 + c_norm);
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.gap = xz;
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    sol.iterations = iter;
    if (xz / scale <= opt_.gap_tol && std::abs(pobj - dobj) / scale <= opt_.gap_tol && pinf <= opt_.feas_tol &&
        dinf <= opt_.feas_tol) {
      break;
    }
    if (iter == opt_.max_iterations) {
      std::ostringstream os;
      os << "sdp: no convergence after " << iter << " iterations (gap " << xz << ", primal residual " << pinf
         << ", dual residual " << dinf << ", objectives " << pobj << " / " << dobj << ")";
      throw NumericalError(os.str());
    }
    const double mu = xz / n_cone;
    const Blocks W = inverse(Z);
    build_schur(X, W);

    const Vec a_x = apply_all(X);
    const Vec a_w = apply_all(W);
    const Vec a_xrw = apply_all(triple(X, Rd, W));

    auto direction = [&](double sigma_mu, const Blocks* corr, Blocks& dX, Blocks& dZ, Vec& dy) {
      Vec h = rp + a_x - sigma_mu * a_w + a_xrw;
      if (corr != nullptr) h += apply_all(*corr);
      dy = solve_schur(h);
      const Blocks aty = adjoint(dy);
      dZ = Rd;
      for (int k = 0; k < nb; ++k) dZ[k] -= aty[k];
      const Blocks xdzw = triple(X, dZ, W);
      dX.clear();
      for (int k = 0; k < nb; ++k) {
        Mat d = sigma_mu * W[k] - X[k] - xdzw[k];
        if (corr != nullptr) d -= (*corr)[k];
        dX.push_back(std::move(d));
      }
      symmetrize(dX);
    };

    Blocks dXa, dZa;
    Vec dya;
    direction(0.0, nullptr, dXa, dZa, dya);
    const double ap = std::min(1.0, max_step(X, dXa));
    const double ad = std::min(1.0, max_step(Z, dZa));
    double xz_aff = 0.0;
    for (int k = 0; k < nb; ++k) xz_aff += (X[k] + ap * dXa[k]).cwiseProduct(Z[k] + ad * dZa[k]).sum();
    const double sigma = std::clamp(std::pow(std::max(xz_aff, 0.0) / xz, 3.0), 0.0, 1.0);

    const Blocks corr = triple(dXa, dZa, W);
    Blocks dX, dZ;
    Vec dy;
    direction(sigma * mu, &corr, dX, dZ, dy);
    const double gamma = 0.95;
    double sp = std::min(1.0, gamma * max_step(X, dX));
    double sd = std::min(1.0, gamma * max_step(Z, dZ));
    // Round-off near the boundary can leave the eigenvalue step slightly too
    // long; shrink until every block still factors.
    auto advance = [&](const Blocks& base, const Blocks& d, double& step) {
      for (int attempt = 0; attempt < 60; ++attempt) {
        Blocks next = base;
        bool ok = true;
        for (int k = 0; k < nb && ok; ++k) {
          next[k] += step * d[k];
          if (p_.cones[k].kind == ConeKind::kPsd) {
            next[k] = 0.5 * (next[k] + next[k].transpose()).eval();
            ok = Eigen::LLT<Mat>(next[k]).info() == Eigen::Success;
          } else {
            ok = next[k].minCoeff() > 0.0;
          }
        }
        if (ok) return next;
        step *= 0.8;
      }
      throw NumericalError("sdp: iterate lost positive definiteness");
    };
    X = advance(X, dX, sp);
    Z = advance(Z, dZ, sd);
    y += sd * dy;
  }
  sol.X = X;
  sol.Z = Z;
  sol.y = y;
  for (int i = 0; i < m_; ++i) sol.y(i) *= row_scale_[i];
  return sol;
}

}  // namespace detail

/// Solves the program; throws NumericalError with residuals when the
/// iteration budget is exhausted.
inline Solution solve(const Problem& problem, const Options& options = {}) {
  detail::Solver solver(problem, options);
  return solver.run();
}

}  // namespace seqtest::sdp
