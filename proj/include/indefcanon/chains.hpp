#pragma once

// Jordan chain extraction for a matrix whose Jordan structure is given, and
// the reduction of real-eigenvalue chains to sip form (which fixes the sign
// characteristic). Restricted to one Jordan block per distinct eigenvalue.

#include <vector>

#include "indefcanon/matrix.hpp"
#include "indefcanon/structure.hpp"

namespace indefcanon {

struct ChainOptions {
  /// Relative singular-value threshold for rank decisions.
  double rank_tol = 1e-8;
  /// Allowed distance between a spec eigenvalue and the mean of the p
  /// nearest computed eigenvalues, relative to max(1, |lambda|).
  double drift_radius = 1e-6;
};

/// Per block, the chain matrix with columns v_0 ... v_{p-1}, lowest order
/// first: (A - lambda I) v_0 = 0 and (A - lambda I) v_{j+1} = v_j. PAIR
/// blocks carry only the lambda chain.
struct ChainSet {
  std::vector<CMatrix> chains;

  const CMatrix& generator_chain(std::size_t block) const { return chains.at(block); }
};

/// Throws StructureMismatch when the nullspace dimensions of the powers of
/// (A - lambda I) contradict the spec, EigenvalueDrift when no spectral
/// cluster sits near a spec eigenvalue.
ChainSet jordan_chains(const CMatrix& a, const JordanSpec& spec, const ChainOptions& opts = {});

/// Largest ||(A - lambda I) chain[j+1] - chain[j]|| (and ||(A - lambda I) chain[0]||)
/// over all blocks, relative to the chain norm.
double chain_residual(const CMatrix& a, const JordanSpec& spec, const ChainSet& chains);

struct ReducedChain {
  CMatrix chain;
  int sign = 1;
};

/// Rescales and Toeplitz-corrects a real-eigenvalue chain so that its
/// Gram matrix chain* H chain becomes sign * anti_identity(p).
/// Throws DegenerateGram when the anti-diagonal Gram entry vanishes.
ReducedChain real_block_reduce(const CMatrix& chain, const CMatrix& h, double tol = 1e-8);

struct FoBasis {
  CMatrix basis;
  std::vector<int> signs;  ///< sign characteristic per block (+1 for PAIR)
};

/// A flipped-orthogonal basis: (A,H) -> (build_J(spec), build_P(spec)).
/// Pair blocks use independently computed lambda and conj(lambda) chains,
/// so the result is in general not conjugate symmetric.
FoBasis fo_basis(const CMatrix& a, const CMatrix& h, const JordanSpec& spec,
                 const ChainOptions& opts = {});

}  // namespace indefcanon
