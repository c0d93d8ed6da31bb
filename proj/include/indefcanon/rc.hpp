#pragma once

// Real canonical (RC) bases: R = T S with T an i-FOCS basis, so that
// (A,H) -> (J_R, P) with every matrix real; and the converse T = R S^{-1}.

#include "indefcanon/focs.hpp"

namespace indefcanon {

/// Imaginary parts up to this fraction of ||R|| are truncated to zero.
inline constexpr double kRealTruncation = 1e-9;

struct RcResult {
  CanonicalBasis basis;     ///< role Rc, matrix with exactly zero imaginary part
  double max_imag_before = 0.0;  ///< largest |Im| prior to truncation
  FocsResult focs;          ///< the i-FOCS basis and its pipeline trace
};

/// Throws NotReal when T S has an imaginary part above kRealTruncation * ||R||.
RcResult rc_basis(const CMatrix& a, const CMatrix& h, const JordanSpec& spec, const FocsOptions& opts = {});

/// Multiplies an i-FOCS basis by S and truncates the imaginary part.
CMatrix rc_from_focs(const CMatrix& t, const JordanSpec& spec, double* max_imag_before = nullptr);

/// T = R S^{-1}; throws NotCs unless T is i-CS within tol.
CanonicalBasis focs_from_rc(const CMatrix& r, const JordanSpec& spec, double tol = kDefaultTol);

}  // namespace indefcanon
