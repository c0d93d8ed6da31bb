#include "indefcanon/rc.hpp"

#include <sstream>

#include "indefcanon/error.hpp"

namespace indefcanon {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

CMatrix rc_from_focs(const CMatrix& t, const JordanSpec& spec, double* max_imag_before) {
  const CMatrix r = t * build_S(spec);
  const double imag = max_imag(r);
  if (max_imag_before) *max_imag_before = imag;
  const double rnorm = spectral_norm(r);
  if (imag > kRealTruncation * rnorm) {
    std::ostringstream os;
    os << "largest imaginary part " << imag << " exceeds " << kRealTruncation << " * ||R|| = "
       << kRealTruncation * rnorm;
    throw CanonError(ErrorCode::NotReal, os.str());
  }
  return to_complex(r.real());
}

RcResult rc_basis(const CMatrix& a, const CMatrix& h, const JordanSpec& spec, const FocsOptions& opts) {
  if (max_imag(a) != 0.0 || max_imag(h) != 0.0) {
    throw CanonError(ErrorCode::NotReal, "real canonical bases need a real pair (A, H)");
  }
  RcResult out;
  FocsOptions focs_opts = opts;
  if (opts.anchor) focs_opts.anchor = CMatrix(*opts.anchor * build_S_inv(spec));
  out.focs = focs_basis(a, h, spec, kI, focs_opts);

  CanonicalBasis& basis = out.basis;
  basis.role = BasisRole::Rc;
  basis.gamma = out.focs.basis.gamma;
  basis.signs = out.focs.basis.signs;
  basis.matrix = rc_from_focs(out.focs.basis.matrix, spec, &out.max_imag_before);
  basis.residuals = affiliation_residuals(a, h, basis.matrix, to_complex(build_JR(spec)), build_P(spec));
  return out;
}

CanonicalBasis focs_from_rc(const CMatrix& r, const JordanSpec& spec, double tol) {
  CanonicalBasis out;
  out.role = BasisRole::Focs;
  out.matrix = r * build_S_inv(spec);
  const Complex gamma = check_cs(out.matrix, spec, tol);
  if (spec.has_pairs() && std::abs(gamma - kI) > tol) {
    std::ostringstream os;
    os << "basis is " << gamma << "-CS, expected i-CS";
    throw CanonError(ErrorCode::NotCs, os.str());
  }
  out.gamma = kI;
  out.signs.assign(spec.blocks.size(), 1);
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    if (!spec.blocks[k].is_pair()) out.signs[k] = spec.blocks[k].sign;
  }
  return out;
}

}  // namespace indefcanon
