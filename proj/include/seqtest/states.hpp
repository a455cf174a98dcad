#pragma once

// Density matrices, spectral decomposition and the canonical qubit
// hypothesis pairs parameterized by purities and a relative Bloch angle.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "seqtest/errors.hpp"

namespace seqtest {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;

/// One violated invariant of a candidate density matrix.
struct Violation {
  enum class Kind { kNotHermitian, kTrace, kNotPsd };
  Kind kind;
  // Largest |m(i,j) - conj(m(j,i))|, |trace - 1|, or the offending eigenvalue.
  double magnitude;

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::kNotHermitian: os << "not Hermitian (max asymmetry " << magnitude << ")"; break;
      case Kind::kTrace: os << "trace violation " << magnitude; break;
      case Kind::kNotPsd: os << "PSD violation at eigenvalue " << magnitude; break;
    }
    return os.str();
  }
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }

  std::string describe() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.describe();
    }
    return out.empty() ? "valid" : out;
  }
};

inline double hermitian_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Checks the three density-matrix invariants. Empty report iff valid.
inline ValidationReport validate_density(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << "density matrix must be square and non-empty, got " << m.rows() << "x" << m.cols();
    throw ShapeError(os.str());
  }
  ValidationReport report;
  const double asym = hermitian_defect(m);
  if (asym > kHermitianTol) report.violations.push_back({Violation::Kind::kNotHermitian, asym});

  const double trace_err = std::abs(m.trace().real() - 1.0) + std::abs(m.trace().imag());
  if (trace_err > kTraceTol) report.violations.push_back({Violation::Kind::kTrace, trace_err});

  // Eigenvalues of the Hermitian part; meaningful even when asymmetry was flagged.
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kPsdTol) report.violations.push_back({Violation::Kind::kNotPsd, min_eig});
  return report;
}

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
/// Each eigenvector's first component above 1e-12 in modulus is real positive.
struct Spectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  ComplexMatrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

/// Spectral decomposition of any Hermitian matrix (not necessarily unit trace).
inline Spectrum eigendecompose_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("eigendecomposition needs a square matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermitian_defect(m) > kHermitianTol * scale) {
    throw ValidationError("eigendecomposition input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");

  const Eigen::Index d = m.rows();
  Spectrum out;
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d, d);
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = d - 1 - k;
    out.eigenvalues(k) = es.eigenvalues()(src);
    ComplexVector v = es.eigenvectors().col(src);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        v *= std::conj(v(i)) / std::abs(v(i));
        v(i) = std::abs(v(i));
        break;
      }
    }
    out.eigenvectors.col(k) = v;
  }
  return out;
}

/// Validated quantum state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  static DensityMatrix from(const ComplexMatrix& m) {
    const ValidationReport report = validate_density(m);
    if (!report.valid()) throw ValidationError("invalid density matrix: " + report.describe());
    return DensityMatrix(0.5 * (m + m.adjoint()));
  }

  static DensityMatrix from(const RealMatrix& m) { return from(ComplexMatrix(m.cast<Complex>())); }

  static DensityMatrix maximally_mixed(Eigen::Index dim) {
    if (dim < 1) throw DomainError("dimension must be positive");
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

  bool is_real(double tol = 1e-14) const { return m_.imag().cwiseAbs().maxCoeff() <= tol; }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Spectrum of a density matrix, with eigenvalues in [-1e-12, 0] clamped to 0.
inline Spectrum eigendecompose(const DensityMatrix& rho) {
  Spectrum s = eigendecompose_hermitian(rho.matrix());
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    if (s.eigenvalues(k) < 0.0 && s.eigenvalues(k) >= -kPsdTol) s.eigenvalues(k) = 0.0;
  }
  return s;
}

inline Complex trace_inner(const DensityMatrix& a, const DensityMatrix& b) {
  return (a.matrix() * b.matrix()).trace();
}

/// Two qubit hypotheses: purities r0 (null, rho) and r1 (alternative, sigma)
/// with Bloch vectors at relative angle theta.
struct QubitPair {
  double r0 = 0.0;
  double r1 = 0.0;
  double theta = 0.0;

  void validate() const {
    auto check = [](double v, double lo, double hi, const char* name) {
      if (!(v >= lo && v <= hi)) {
        std::ostringstream os;
        os << "QubitPair field '" << name << "' = " << v << " outside [" << lo << ", " << hi << "]";
        throw DomainError(os.str());
      }
    };
    check(r0, 0.0, 1.0, "r0");
    check(r1, 0.0, 1.0, "r1");
    check(theta, 0.0, std::numbers::pi, "theta");
  }

  QubitPair swapped() const { return {r1, r0, theta}; }
  bool equal_purity() const { return r0 == r1; }
};

/// rho = r0 |psi0><psi0| + (1-r0) 1/2 and likewise sigma, with
/// |psi_i> = cos(theta/4)|0> + (-1)^i sin(theta/4)|1>.
inline std::pair<DensityMatrix, DensityMatrix> make_qubit_pair(double r0, double r1, double theta) {
  const QubitPair pair{r0, r1, theta};
  pair.validate();
  auto build = [theta](double r, int sign) {
    Eigen::Vector2d psi(std::cos(theta / 4.0), sign * std::sin(theta / 4.0));
    const RealMatrix m = r * psi * psi.transpose() + (1.0 - r) * 0.5 * RealMatrix::Identity(2, 2);
    return DensityMatrix::from(m);
  };
  return {build(r0, +1), build(r1, -1)};
}

inline std::pair<DensityMatrix, DensityMatrix> make_qubit_pair(const QubitPair& p) {
  return make_qubit_pair(p.r0, p.r1, p.theta);
}

}  // namespace seqtest
