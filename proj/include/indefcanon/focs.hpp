#pragma once

// Construction of a gamma-FOCS basis N = Z1 Z2 Z3 Z4:
//
//   (A,H) -Z1-> (J,G)  -Z2-> (J,G1) -Z3-> (J,G2) -Z4-> (J,P)
//
// Z1 assembles conjugate-symmetric chains [L | gamma conj(L)], Z2 rotates
// each pair-block Gram anchor onto the positive real axis, Z3 scales it to
// one, Z4 removes the sub-anti-diagonal Gram entries with an upper
// triangular Toeplitz inverse square root. Every Z_k for k >= 2 has the
// shape diag(W, conj(W)) on pair blocks and commutes with J.

#include <optional>
#include <string_view>
#include <vector>

#include "indefcanon/chains.hpp"
#include "indefcanon/matrix.hpp"
#include "indefcanon/structure.hpp"

namespace indefcanon {

enum class BasisRole { RawChain, Fo, Focs, Rc };

std::string_view to_string(BasisRole role);

/// An invertible basis with the role it plays and its certificates.
struct CanonicalBasis {
  BasisRole role = BasisRole::Focs;
  CMatrix matrix;
  Complex gamma{1.0, 0.0};
  AffiliationResiduals residuals;
  std::vector<int> signs;  ///< per block; +1 for PAIR
};

/// Polar data of the anti-diagonal entry g0 of a pair block's Gram.
struct GramAnchor {
  Complex g0{1.0, 0.0};
  double r = 1.0;    ///< |g0|
  double s = 1.0;    ///< |Re g0|
  double phi = 0.0;  ///< arg g0 in (-pi, pi]

  static GramAnchor from(Complex g0);
};

struct PipelineTrace {
  CMatrix z1, z2, z3, z4;
  CMatrix gram, gram1, gram2;  ///< Z1* H Z1, then after Z2, then after Z3
  CMatrix n;
  Complex gamma{1.0, 0.0};
};

struct FocsOptions {
  ChainOptions chains;
  /// Structural tolerance, scaled by ||H|| ||Z1||^2 where it applies.
  double structure_tol = 1e-8;
  /// Optional reference basis (a gamma-FOCS basis of a nearby pair). When
  /// set, Step-1 chains are aligned to it: real blocks by sign, pair blocks
  /// by the least-squares upper-triangular Toeplitz factor. N is unaffected
  /// up to per-block sign; the Z_k factors become close to their reference.
  std::optional<CMatrix> anchor;
};

/// Z1 from per-block chains: real blocks already reduced to sip form, pair
/// blocks given by their lambda chain L, expanded to [L | gamma conj(L)].
CMatrix step1_symmetrize(const JordanSpec& spec, const std::vector<CMatrix>& block_chains, Complex gamma);

/// Z2 block diag(e^{-i phi/2} sqrt(s/r) I, e^{i phi/2} sqrt(s/r) I) of size 2p.
/// Throws PureImaginaryAnchor when s <= tol * r.
CMatrix step2_phase(const GramAnchor& anchor, int p, double tol = 1e-8);

/// Z3 block (1/sqrt(s)) I of size 2p.
CMatrix step3_scale(const GramAnchor& anchor, int p, double tol = 1e-8);

/// Unit lower-triangular Toeplitz F with F^2 G3 = I for unit lower-triangular
/// Toeplitz G3. Throws NotUnitTriangular when G3 is not of that shape.
CMatrix toeplitz_inv_sqrt(const CMatrix& g3, double tol = 1e-8);

/// Z4 block diag(F, conj(F)) with F upper-triangular Toeplitz and
/// F^T G2 F = anti_identity(p), given the p x p bottom-left Gram block G2
/// (lower anti-triangular Hankel with unit anti-diagonal).
CMatrix step4_correct(const CMatrix& g2_block, double tol = 1e-8);

/// Largest deviations of each pair-block Gram from the shape
/// [[0, G*], [G, 0]] with G lower anti-triangular Hankel.
struct PairGramShape {
  double x_block = 0.0;     ///< top-left block magnitude
  double u_block = 0.0;     ///< bottom-right block magnitude
  double zero_pattern = 0.0;  ///< entries above the anti-diagonal of G
  double hankel = 0.0;      ///< spread along anti-diagonals of G
};

PairGramShape pair_gram_shape(const CMatrix& gram, const JordanSpec& spec);

/// Bottom-left p x p block of the pair block k of a Gram matrix.
CMatrix pair_gram_block(const CMatrix& gram, const JordanSpec& spec, std::size_t block);

struct FocsResult {
  CanonicalBasis basis;
  PipelineTrace trace;
};

FocsResult focs_basis(const CMatrix& a, const CMatrix& h, const JordanSpec& spec, Complex gamma,
                      const FocsOptions& opts = {});

/// Per-block sign (+1/-1) minimizing ||N_block -/+ Ref_block||, applied to N.
/// The only gauge that keeps J, P and a fixed gamma.
CMatrix sign_align(const CMatrix& n, const CMatrix& reference, const JordanSpec& spec,
                   std::vector<int>* chosen = nullptr);

}  // namespace indefcanon
