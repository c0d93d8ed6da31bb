#pragma once

// Dense complex/real matrix carriers plus the handful of numerical
// primitives every other module needs: norms, guarded solves and the
// affiliation residuals (A,H) -> (J,P) under a basis T.

#include <complex>
#include <limits>

#include <Eigen/Dense>

namespace indefcanon {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class NormKind { Spectral, Frobenius };

inline constexpr double kDefaultTol = 1e-10;
/// Solves are refused below this reciprocal condition number.
inline constexpr double kSingularRcond = 1e3 * std::numeric_limits<double>::epsilon();

/// Largest singular value; 0 for an empty matrix.
double spectral_norm(const CMatrix& m);
double spectral_norm(const RMatrix& m);

double matrix_norm(const CMatrix& m, NormKind kind);

/// Ratio of smallest to largest singular value (0 for singular, 1 for empty).
double reciprocal_condition(const CMatrix& m);

/// X with M X = B. Throws CanonError{Singular} when M is numerically singular.
CMatrix solve(const CMatrix& m, const CMatrix& b);
RMatrix solve(const RMatrix& m, const RMatrix& b);

CMatrix inverse(const CMatrix& m);

struct AffiliationResiduals {
  double similarity = 0.0;  ///< ||A T - T J|| / ||T||
  double congruence = 0.0;  ///< ||T* H T - P||

  bool within(double tol) const { return similarity <= tol && congruence <= tol; }
};

/// Certifies (A,H) -> (J,P) under T. The similarity part is measured
/// multiplication-side so no inverse of T is formed.
AffiliationResiduals affiliation_residuals(const CMatrix& a, const CMatrix& h, const CMatrix& t,
                                           const CMatrix& j, const CMatrix& p,
                                           NormKind kind = NormKind::Spectral);

inline CMatrix to_complex(const RMatrix& m) { return m.cast<Complex>(); }

bool all_finite(const CMatrix& m);

/// Largest |Im| entry.
double max_imag(const CMatrix& m);

/// Real part; imaginary parts are dropped without inspection.
RMatrix real_part(const CMatrix& m);

}  // namespace indefcanon
