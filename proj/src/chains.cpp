#include "indefcanon/chains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "indefcanon/error.hpp"
#include "indefcanon/toeplitz.hpp"

namespace indefcanon {

namespace {

bool is_real(const CMatrix& m) { return max_imag(m) == 0.0; }

// Orthonormal basis of the numerical nullspace of m.
template <class Matrix>
Matrix nullspace(const Matrix& m, double threshold) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

// Grows ker B, ker B^2, ... one multiplication by B at a time: x lies in
// ker B^{j+1} iff B x lies in ker B^j. Avoids forming powers of B, whose
// singular values spread too far apart for a relative threshold.
template <class Matrix>
Matrix generalized_eigenspace(const Matrix& b, int p, double threshold, std::size_t block) {
  const Eigen::Index n = b.rows();
  Matrix basis(n, 0);
  for (int j = 1; j <= p + 1; ++j) {
    const Matrix proj = Matrix::Identity(n, n) - basis * basis.adjoint();
    const Matrix next = nullspace<Matrix>(Matrix(proj * b), threshold);
    const int expected = std::min(j, p);
    if (next.cols() != expected) {
      std::ostringstream os;
      os << "block " << block << ": dim ker (A - lambda I)^" << j << " = " << next.cols()
         << ", expected " << expected;
      throw CanonError(ErrorCode::StructureMismatch, os.str());
    }
    if (j == p) return next;
    basis = next;
  }
  return basis;  // unreachable: returns at j == p
}

template <class Matrix>
Matrix chain_from(const Matrix& b, const Matrix& space, int p) {
  const Eigen::Index n = b.rows();
  // v in span(space) maximizing ||B^{p-1} v||.
  Matrix image = space;
  for (int k = 0; k + 1 < p; ++k) image = b * image;
  Eigen::JacobiSVD<Matrix> svd(image, Eigen::ComputeFullV);
  using Vec = Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, 1>;
  Vec v = space * svd.matrixV().col(0);
  v.normalize();
  // Deterministic phase: first entry of non-negligible size made real positive.
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v(i)) > 1e-3 * peak) {
      v *= std::abs(v(i)) / v(i);
      break;
    }
  }
  Matrix chain(n, p);
  chain.col(p - 1) = v;
  for (int j = p - 2; j >= 0; --j) chain.col(j) = b * chain.col(j + 1);
  return chain;
}

void check_drift(const CVector& eigs, const BlockSpec& blk, std::size_t block, double radius) {
  const Complex lam = blk.lambda;
  std::vector<double> dist(eigs.size());
  for (Eigen::Index i = 0; i < eigs.size(); ++i) dist[i] = std::abs(eigs(i) - lam);
  std::vector<Eigen::Index> idx(eigs.size());
  for (Eigen::Index i = 0; i < eigs.size(); ++i) idx[i] = i;
  const std::size_t take = std::min<std::size_t>(blk.size, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                    [&](Eigen::Index x, Eigen::Index y) { return dist[x] < dist[y]; });
  Complex mean{};
  for (std::size_t i = 0; i < take; ++i) mean += eigs(idx[i]);
  mean /= static_cast<double>(take);
  if (std::abs(mean - lam) > radius * std::max(1.0, std::abs(lam))) {
    std::ostringstream os;
    os << "block " << block << ": nearest spectral cluster " << mean << " too far from " << lam;
    throw CanonError(ErrorCode::EigenvalueDrift, os.str());
  }
}

}  // namespace

ChainSet jordan_chains(const CMatrix& a, const JordanSpec& spec, const ChainOptions& opts) {
  spec.validate();
  const Eigen::Index n = a.rows();
  if (a.cols() != n || spec.total_size() != n) {
    throw CanonError(ErrorCode::StructureMismatch, "matrix size does not match the Jordan structure");
  }
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  const CVector eigs = es.eigenvalues();
  const bool real_a = is_real(a);
  const double anorm = spectral_norm(a);

  ChainSet out;
  out.chains.reserve(spec.blocks.size());
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    check_drift(eigs, blk, k, opts.drift_radius);
    const double threshold = opts.rank_tol * std::max({anorm, std::abs(blk.lambda), 1.0});
    if (real_a && !blk.is_pair()) {
      const RMatrix b = a.real() - blk.lambda.real() * RMatrix::Identity(n, n);
      const RMatrix space = generalized_eigenspace<RMatrix>(b, blk.size, threshold, k);
      out.chains.push_back(to_complex(chain_from<RMatrix>(b, space, blk.size)));
    } else {
      const CMatrix b = a - blk.lambda * CMatrix::Identity(n, n);
      const CMatrix space = generalized_eigenspace<CMatrix>(b, blk.size, threshold, k);
      out.chains.push_back(chain_from<CMatrix>(b, space, blk.size));
    }
  }
  return out;
}

double chain_residual(const CMatrix& a, const JordanSpec& spec, const ChainSet& chains) {
  double worst = 0.0;
  const Eigen::Index n = a.rows();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    const CMatrix& c = chains.chains.at(k);
    const CMatrix b = a - blk.lambda * CMatrix::Identity(n, n);
    // B C - C N with N the nilpotent shift.
    CMatrix shifted = CMatrix::Zero(n, blk.size);
    if (blk.size > 1) shifted.rightCols(blk.size - 1) = c.leftCols(blk.size - 1);
    const double scale = std::max(spectral_norm(c), 1e-300);
    worst = std::max(worst, spectral_norm(CMatrix(b * c - shifted)) / scale);
  }
  return worst;
}

ReducedChain real_block_reduce(const CMatrix& chain, const CMatrix& h, double tol) {
  const int p = static_cast<int>(chain.cols());
  const CMatrix gram = chain.adjoint() * h * chain;
  const double g0 = gram(0, p - 1).real();
  const double cnorm = spectral_norm(chain);
  if (std::abs(g0) < tol * spectral_norm(h) * cnorm * cnorm) {
    std::ostringstream os;
    os << "anti-diagonal Gram entry " << g0 << " is numerically zero";
    throw CanonError(ErrorCode::DegenerateGram, os.str());
  }
  const int sign = g0 > 0.0 ? 1 : -1;
  // sign * Gram / |g0| has a unit anti-diagonal; times the anti-identity it is
  // unit lower-triangular Toeplitz with first column g[i] = entry (i, p-1).
  std::vector<Complex> g(p);
  for (int i = 0; i < p; ++i) {
    // average along the anti-diagonal i + j = p - 1 + i of the Hankel Gram
    Complex acc{};
    int count = 0;
    for (int r = i; r < p; ++r) {
      acc += gram(r, p - 1 + i - r);
      ++count;
    }
    g[i] = static_cast<double>(sign) * acc / (static_cast<double>(count) * std::abs(g0));
  }
  g[0] = 1.0;
  const auto f = toeplitz::inv_sqrt_column(g);
  // Upper-triangular Toeplitz with first row f commutes with the Jordan block.
  CMatrix upper = CMatrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) upper(i, j) = f[j - i];
  }
  ReducedChain out;
  out.sign = sign;
  out.chain = chain * upper / std::sqrt(std::abs(g0));
  if (max_imag(chain) == 0.0 && max_imag(h) == 0.0) out.chain = out.chain.real().cast<Complex>();
  return out;
}

FoBasis fo_basis(const CMatrix& a, const CMatrix& h, const JordanSpec& spec, const ChainOptions& opts) {
  const ChainSet chains = jordan_chains(a, spec, opts);
  JordanSpec conj_spec = spec;
  for (auto& blk : conj_spec.blocks) {
    if (blk.is_pair()) blk.lambda = std::conj(blk.lambda);
  }
  const ChainSet conj_chains = spec.has_pairs() ? jordan_chains(a, conj_spec, opts) : ChainSet{};

  const int n = spec.total_size();
  FoBasis out;
  out.basis = CMatrix::Zero(n, n);
  const auto offs = spec.offsets();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& blk = spec.blocks[k];
    const int p = blk.size;
    if (!blk.is_pair()) {
      const ReducedChain red = real_block_reduce(chains.chains[k], h, opts.rank_tol);
      if (red.sign != blk.sign) {
        std::ostringstream os;
        os << "block " << k << ": sign characteristic is " << red.sign << ", expected " << blk.sign;
        throw CanonError(ErrorCode::StructureMismatch, os.str());
      }
      out.basis.middleCols(offs[k], p) = red.chain;
      out.signs.push_back(red.sign);
      continue;
    }
    const CMatrix& lo = chains.chains[k];
    const CMatrix& hi = conj_chains.chains[k];
    // Bottom-left Gram block hi* H lo is lower anti-triangular Hankel; its
    // product with the anti-identity is lower Toeplitz G3, and hi G3^{-*}
    // turns the block into the anti-identity.
    const CMatrix g = hi.adjoint() * h * lo;
    const CMatrix g3 = g * to_complex(anti_identity(p));
    if (std::abs(g3(0, 0)) == 0.0) {
      throw CanonError(ErrorCode::DegenerateGram, "pair block Gram anchor vanishes");
    }
    CMatrix g3_toeplitz = CMatrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j <= i; ++j) g3_toeplitz(i, j) = g3(i - j, 0);
    }
    const CMatrix correction = inverse(g3_toeplitz).adjoint();
    out.basis.middleCols(offs[k], p) = lo;
    out.basis.middleCols(offs[k] + p, p) = hi * correction;
    out.signs.push_back(1);
  }
  return out;
}

}  // namespace indefcanon
