#include "indefcanon/focs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "indefcanon/error.hpp"
#include "indefcanon/toeplitz.hpp"

namespace indefcanon {

std::string_view to_string(BasisRole role) {
  switch (role) {
    case BasisRole::RawChain: return "raw-chain";
    case BasisRole::Fo: return "fo";
    case BasisRole::Focs: return "focs";
    case BasisRole::Rc: return "rc";
  }
  return "unknown";
}

GramAnchor GramAnchor::from(Complex g0) {
  GramAnchor a;
  a.g0 = g0;
  a.r = std::abs(g0);
  a.s = std::abs(g0.real());
  a.phi = std::arg(g0);
  if (a.phi <= -std::numbers::pi) a.phi = std::numbers::pi;
  return a;
}

CMatrix step1_symmetrize(const JordanSpec& spec, const std::vector<CMatrix>& block_chains, Complex gamma) {
  if (gamma == Complex(0.0, 0.0)) throw CanonError(ErrorCode::InvalidSpec, "gamma must be nonzero");
  if (block_chains.size() != spec.blocks.size()) {
    throw CanonError(ErrorCode::StructureMismatch, "one chain per block required");
  }
  const int n = spec.total_size();
  CMatrix z1 = CMatrix::Zero(block_chains.empty() ? n : block_chains.front().rows(), n);
  const auto offs = spec.offsets();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    const CMatrix& c = block_chains[k];
    if (c.cols() != blk.size || c.rows() != z1.rows()) {
      throw CanonError(ErrorCode::StructureMismatch, "chain shape does not match its block");
    }
    z1.middleCols(offs[k], blk.size) = c;
    if (blk.is_pair()) z1.middleCols(offs[k] + blk.size, blk.size) = gamma * c.conjugate();
  }
  return z1;
}

namespace {

void require_real_part(const GramAnchor& anchor, double tol) {
  if (!(anchor.s > tol * anchor.r)) {
    std::ostringstream os;
    os << "anchor " << anchor.g0 << " has no usable real part";
    throw CanonError(ErrorCode::PureImaginaryAnchor, os.str());
  }
}

// Mean of entries (i, j) with i + j == p - 1 + d in the bottom-left block.
Complex antidiagonal_mean(const CMatrix& g, int d) {
  const int p = static_cast<int>(g.rows());
  Complex acc{};
  int count = 0;
  for (int r = d; r < p; ++r) {
    acc += g(r, p - 1 + d - r);
    ++count;
  }
  return acc / static_cast<double>(count);
}

}  // namespace

CMatrix step2_phase(const GramAnchor& anchor, int p, double tol) {
  require_real_part(anchor, tol);
  const double mag = std::sqrt(anchor.s / anchor.r);
  const Complex rot = std::polar(1.0, -anchor.phi / 2.0);
  CMatrix z = CMatrix::Zero(2 * p, 2 * p);
  z.topLeftCorner(p, p).diagonal().setConstant(rot * mag);
  z.bottomRightCorner(p, p).diagonal().setConstant(std::conj(rot) * mag);
  return z;
}

CMatrix step3_scale(const GramAnchor& anchor, int p, double tol) {
  require_real_part(anchor, tol);
  return CMatrix::Identity(2 * p, 2 * p) / std::sqrt(anchor.s);
}

CMatrix toeplitz_inv_sqrt(const CMatrix& g3, double tol) {
  const Eigen::Index p = g3.rows();
  if (g3.cols() != p) throw CanonError(ErrorCode::NotUnitTriangular, "matrix is not square");
  const double scale = std::max(1.0, spectral_norm(g3));
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(g3(i, i) - 1.0) > tol) {
      std::ostringstream os;
      os << "diagonal entry " << i << " is " << g3(i, i);
      throw CanonError(ErrorCode::NotUnitTriangular, os.str());
    }
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (std::abs(g3(i, j)) > tol * scale) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") above the diagonal is " << g3(i, j);
        throw CanonError(ErrorCode::NotUnitTriangular, os.str());
      }
    }
  }
  // Diagonal means project onto Toeplitz structure.
  std::vector<Complex> col(p);
  for (Eigen::Index d = 0; d < p; ++d) {
    Complex acc{};
    for (Eigen::Index i = d; i < p; ++i) acc += g3(i, i - d);
    col[d] = acc / static_cast<double>(p - d);
  }
  if (p > 0) col[0] = 1.0;
  const auto f = toeplitz::inv_sqrt_column(col);
  CMatrix out = CMatrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) out(i, j) = f[i - j];
  }
  return out;
}

CMatrix step4_correct(const CMatrix& g2_block, double tol) {
  const int p = static_cast<int>(g2_block.rows());
  const CMatrix g3 = g2_block * to_complex(anti_identity(p));
  const CMatrix upper = toeplitz_inv_sqrt(g3, tol).transpose();
  CMatrix z = CMatrix::Zero(2 * p, 2 * p);
  z.topLeftCorner(p, p) = upper;
  z.bottomRightCorner(p, p) = upper.conjugate();
  return z;
}

CMatrix pair_gram_block(const CMatrix& gram, const JordanSpec& spec, std::size_t block) {
  const auto& blk = spec.blocks.at(block);
  const int o = spec.offsets()[block];
  return gram.block(o + blk.size, o, blk.size, blk.size);
}

PairGramShape pair_gram_shape(const CMatrix& gram, const JordanSpec& spec) {
  PairGramShape out;
  const auto offs = spec.offsets();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    if (!blk.is_pair()) continue;
    const int p = blk.size;
    const int o = offs[k];
    out.x_block = std::max(out.x_block, gram.block(o, o, p, p).cwiseAbs().maxCoeff());
    out.u_block = std::max(out.u_block, gram.block(o + p, o + p, p, p).cwiseAbs().maxCoeff());
    const CMatrix g = pair_gram_block(gram, spec, k);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        if (i + j < p - 1) {
          out.zero_pattern = std::max(out.zero_pattern, std::abs(g(i, j)));
        } else {
          const Complex mean = antidiagonal_mean(g, i + j - (p - 1));
          out.hankel = std::max(out.hankel, std::abs(g(i, j) - mean));
        }
      }
    }
  }
  return out;
}

namespace {

// Upper-triangular Toeplitz U minimizing ||L U - ref||_F.
CMatrix toeplitz_fit(const CMatrix& chain, const CMatrix& ref) {
  const Eigen::Index n = chain.rows();
  const Eigen::Index p = chain.cols();
  CMatrix design = CMatrix::Zero(n * p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    for (Eigen::Index j = k; j < p; ++j) design.block(j * n, k, n, 1) = chain.col(j - k);
  }
  const CVector target = Eigen::Map<const CVector>(ref.data(), n * p);
  const CVector u = design.colPivHouseholderQr().solve(target);
  if (std::abs(u(0)) <= 1e-8 * u.cwiseAbs().maxCoeff()) {
    throw CanonError(ErrorCode::SingularBasis, "anchor basis is not aligned with the chain");
  }
  CMatrix up = CMatrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) up(i, j) = u(j - i);
  }
  return up;
}

// Chains are fixed only up to a complex scale c, which turns g0 by c^2.
// Pick c among the eighth roots of unity so that |arg g0| <= pi/4; Step 2
// then never meets an anchor near the imaginary axis.
Complex quarter_turn(const CMatrix& l, const CMatrix& h, Complex gamma) {
  const Eigen::Index p = l.cols();
  const Complex g0 = std::conj(gamma) * (l.col(0).transpose() * h * l.col(p - 1))(0, 0);
  if (g0 == Complex(0.0, 0.0)) return 1.0;
  const double turns = std::round(std::arg(g0) / (std::numbers::pi / 2));
  return std::polar(1.0, -turns * std::numbers::pi / 4);
}

int closer_sign(const CMatrix& x, const CMatrix& ref) {
  return (x - ref).norm() <= (x + ref).norm() ? 1 : -1;
}

}  // namespace

CMatrix sign_align(const CMatrix& n, const CMatrix& reference, const JordanSpec& spec, std::vector<int>* chosen) {
  CMatrix out = n;
  if (chosen) chosen->clear();
  const auto offs = spec.offsets();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const int d = spec.blocks[k].dim();
    const int sgn = closer_sign(n.middleCols(offs[k], d), reference.middleCols(offs[k], d));
    if (sgn < 0) out.middleCols(offs[k], d) *= -1.0;
    if (chosen) chosen->push_back(sgn);
  }
  return out;
}

FocsResult focs_basis(const CMatrix& a, const CMatrix& h, const JordanSpec& spec, Complex gamma,
                      const FocsOptions& opts) {
  spec.validate();
  if (gamma == Complex(0.0, 0.0)) throw CanonError(ErrorCode::InvalidSpec, "gamma must be nonzero");
  check_h_selfadjoint(a, h, opts.structure_tol);
  const int n = spec.total_size();
  if (opts.anchor && (opts.anchor->rows() != n || opts.anchor->cols() != n)) {
    throw CanonError(ErrorCode::StructureMismatch, "anchor basis has the wrong size");
  }

  const ChainSet chains = jordan_chains(a, spec, opts.chains);
  const auto offs = spec.offsets();
  std::vector<CMatrix> block_chains;
  std::vector<int> signs;
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    if (!blk.is_pair()) {
      ReducedChain red = real_block_reduce(chains.chains[k], h, opts.structure_tol);
      if (red.sign != blk.sign) {
        std::ostringstream os;
        os << "block " << k << ": sign characteristic is " << red.sign << ", expected " << blk.sign;
        throw CanonError(ErrorCode::StructureMismatch, os.str());
      }
      if (opts.anchor && closer_sign(red.chain, opts.anchor->middleCols(offs[k], blk.size)) < 0) {
        red.chain *= -1.0;
      }
      block_chains.push_back(std::move(red.chain));
      signs.push_back(red.sign);
    } else {
      CMatrix l = chains.chains[k];
      if (opts.anchor) {
        l = l * toeplitz_fit(l, opts.anchor->middleCols(offs[k], blk.size));
      } else {
        l *= quarter_turn(l, h, gamma);
      }
      block_chains.push_back(std::move(l));
      signs.push_back(1);
    }
  }

  FocsResult out;
  PipelineTrace& tr = out.trace;
  tr.gamma = gamma;
  tr.z1 = step1_symmetrize(spec, block_chains, gamma);
  if (reciprocal_condition(tr.z1) < kSingularRcond) {
    throw CanonError(ErrorCode::SingularBasis, "chain basis is numerically singular");
  }
  tr.gram = tr.z1.adjoint() * h * tr.z1;

  const double z1norm = spectral_norm(tr.z1);
  const double shape_tol = opts.structure_tol * spectral_norm(h) * z1norm * z1norm;
  const PairGramShape shape = pair_gram_shape(tr.gram, spec);
  if (std::max({shape.x_block, shape.u_block, shape.zero_pattern, shape.hankel}) > shape_tol) {
    std::ostringstream os;
    os << "pair-block Gram lost its shape (X " << shape.x_block << ", U " << shape.u_block
       << ", zero pattern " << shape.zero_pattern << ", Hankel " << shape.hankel << ")";
    throw CanonError(ErrorCode::StructureMismatch, os.str());
  }

  tr.z2 = CMatrix::Identity(n, n);
  tr.z3 = CMatrix::Identity(n, n);
  tr.z4 = CMatrix::Identity(n, n);
  std::vector<GramAnchor> anchors(spec.blocks.size());
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    if (!blk.is_pair()) continue;
    anchors[k] = GramAnchor::from(antidiagonal_mean(pair_gram_block(tr.gram, spec, k), 0));
    try {
      tr.z2.block(offs[k], offs[k], blk.dim(), blk.dim()) = step2_phase(anchors[k], blk.size, opts.structure_tol);
      tr.z3.block(offs[k], offs[k], blk.dim(), blk.dim()) = step3_scale(anchors[k], blk.size, opts.structure_tol);
    } catch (const CanonError& e) {
      std::ostringstream os;
      os << "block " << k << ": " << e.detail();
      throw CanonError(e.code(), os.str());
    }
  }
  tr.gram1 = tr.z2.adjoint() * tr.gram * tr.z2;
  tr.gram2 = tr.z3.adjoint() * tr.gram1 * tr.z3;
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    if (!blk.is_pair()) continue;
    tr.z4.block(offs[k], offs[k], blk.dim(), blk.dim()) =
        step4_correct(pair_gram_block(tr.gram2, spec, k), opts.structure_tol);
  }
  tr.n = tr.z1 * tr.z2 * tr.z3 * tr.z4;

  CanonicalBasis& basis = out.basis;
  basis.role = BasisRole::Focs;
  basis.matrix = tr.n;
  basis.signs = std::move(signs);
  basis.residuals = affiliation_residuals(a, h, tr.n, build_J(spec), build_P(spec));
  basis.gamma = spec.has_pairs() ? measure_cs(tr.n, spec).gamma : gamma;
  return out;
}

}  // namespace indefcanon
