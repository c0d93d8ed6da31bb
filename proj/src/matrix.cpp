#include "indefcanon/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "indefcanon/error.hpp"

namespace indefcanon {

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMatrix> svd(m);
  return svd.singularValues()(0);
}

double matrix_norm(const CMatrix& m, NormKind kind) {
  return kind == NormKind::Spectral ? spectral_norm(m) : m.norm();
}

double reciprocal_condition(const CMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  if (smax == 0.0) return 0.0;
  return s(s.size() - 1) / smax;
}

namespace {

void require_solvable(double rcond, Eigen::Index rows, Eigen::Index cols, Eigen::Index brows) {
  if (rows != cols || rows != brows) {
    std::ostringstream os;
    os << "shape mismatch in solve: " << rows << "x" << cols << " against " << brows << " rows";
    throw CanonError(ErrorCode::Singular, os.str());
  }
  if (rcond < kSingularRcond) {
    std::ostringstream os;
    os << "reciprocal condition " << rcond << " below threshold " << kSingularRcond;
    throw CanonError(ErrorCode::Singular, os.str());
  }
}

}  // namespace

CMatrix solve(const CMatrix& m, const CMatrix& b) {
  require_solvable(reciprocal_condition(m), m.rows(), m.cols(), b.rows());
  return m.partialPivLu().solve(b);
}

RMatrix solve(const RMatrix& m, const RMatrix& b) {
  require_solvable(reciprocal_condition(to_complex(m)), m.rows(), m.cols(), b.rows());
  return m.partialPivLu().solve(b);
}

CMatrix inverse(const CMatrix& m) {
  return solve(m, CMatrix::Identity(m.rows(), m.cols()));
}

AffiliationResiduals affiliation_residuals(const CMatrix& a, const CMatrix& h, const CMatrix& t,
                                           const CMatrix& j, const CMatrix& p, NormKind kind) {
  AffiliationResiduals out;
  const double tnorm = matrix_norm(t, kind);
  const CMatrix sim = a * t - t * j;
  out.similarity = tnorm > 0.0 ? matrix_norm(sim, kind) / tnorm : matrix_norm(sim, kind);
  out.congruence = matrix_norm(t.adjoint() * h * t - p, kind);
  return out;
}

bool all_finite(const CMatrix& m) {
  return std::all_of(m.data(), m.data() + m.size(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double max_imag(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.imag().cwiseAbs().maxCoeff();
}

RMatrix real_part(const CMatrix& m) { return m.real(); }

}  // namespace indefcanon
