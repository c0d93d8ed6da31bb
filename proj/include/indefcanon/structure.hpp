#pragma once

// Jordan structure descriptions and the canonical targets built from them:
// the Jordan form J, the sip form P, the real Jordan form J_R and the fixed
// transform S between i-FOCS and real canonical bases. Also the structural
// predicates (H-selfadjointness, conjugate symmetry, same Jordan structure).

#include <cstddef>
#include <optional>
#include <vector>

#include "indefcanon/matrix.hpp"

namespace indefcanon {

enum class BlockKind { Real, Pair };

/// One Jordan block (REAL) or one conjugate pair of equally sized blocks
/// J(lambda) + J(conj(lambda)) (PAIR).
struct BlockSpec {
  BlockKind kind = BlockKind::Real;
  Complex lambda{};
  int size = 1;  ///< single-block dimension p
  int sign = 1;  ///< sign characteristic, REAL only

  static BlockSpec real(double lambda, int size, int sign = 1) {
    return {BlockKind::Real, Complex(lambda, 0.0), size, sign};
  }
  static BlockSpec pair(Complex lambda, int size) { return {BlockKind::Pair, lambda, size, 1}; }

  /// Columns occupied in J: p for REAL, 2p for PAIR.
  int dim() const { return kind == BlockKind::Real ? size : 2 * size; }
  bool is_pair() const { return kind == BlockKind::Pair; }
};

struct JordanSpec {
  std::vector<BlockSpec> blocks;

  int total_size() const;
  /// Starting column of each block.
  std::vector<int> offsets() const;
  bool has_pairs() const;

  /// Throws CanonError{InvalidSpec} on size < 1, bad sign, a REAL block with
  /// nonzero imaginary part or a PAIR block with zero imaginary part.
  void validate() const;
};

/// p x p anti-identity.
RMatrix anti_identity(int p);
/// Upper-bidiagonal Jordan block J_p(lambda).
CMatrix jordan_block(Complex lambda, int p);

CMatrix build_J(const JordanSpec& spec);
CMatrix build_P(const JordanSpec& spec);
RMatrix build_JR(const JordanSpec& spec);
CMatrix build_S(const JordanSpec& spec);
CMatrix build_S_inv(const JordanSpec& spec);

/// ||H A - A* H||. Throws NotHermitian when ||H - H*|| > tol * max(1, ||H||)
/// and SingularH when H fails the solve conditioning threshold.
double check_h_selfadjoint(const CMatrix& a, const CMatrix& h, double tol = kDefaultTol);

/// Scale-free variant used for generated instances: residual divided by
/// ||H|| ||A|| (no Hermitian / conditioning checks).
double relative_selfadjoint_residual(const CMatrix& a, const CMatrix& h);

struct CsReport {
  Complex gamma{1.0, 0.0};
  /// max over pair blocks of ||W - gamma conj(Q)|| / ||N||.
  double residual = 0.0;
  std::optional<std::size_t> worst_block;  ///< block index of the largest residual
};

/// Fits one global gamma from the largest-magnitude entry of the first pair
/// block and measures second-half = gamma * conj(first-half) on every pair
/// block. Specs without pair blocks give gamma = 1 and residual 0.
CsReport measure_cs(const CMatrix& n, const JordanSpec& spec);

/// gamma of a gamma-CS basis; throws CanonError{NotCs} with the offending
/// block and residual when the residual exceeds tol.
Complex check_cs(const CMatrix& n, const JordanSpec& spec, double tol = kDefaultTol);

/// Same block kinds, sizes and (REAL) sign multiset; eigenvalues ignored.
bool same_jordan_structure(const JordanSpec& a, const JordanSpec& b);

}  // namespace indefcanon
