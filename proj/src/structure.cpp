#include "indefcanon/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include "indefcanon/error.hpp"

namespace indefcanon {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

int JordanSpec::total_size() const {
  return std::accumulate(blocks.begin(), blocks.end(), 0,
                         [](int acc, const BlockSpec& b) { return acc + b.dim(); });
}

std::vector<int> JordanSpec::offsets() const {
  std::vector<int> out;
  out.reserve(blocks.size());
  int at = 0;
  for (const auto& b : blocks) {
    out.push_back(at);
    at += b.dim();
  }
  return out;
}

bool JordanSpec::has_pairs() const {
  return std::any_of(blocks.begin(), blocks.end(), [](const BlockSpec& b) { return b.is_pair(); });
}

void JordanSpec::validate() const {
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    std::ostringstream os;
    os << "block " << k << ": ";
    if (b.size < 1) {
      os << "size must be >= 1";
      throw CanonError(ErrorCode::InvalidSpec, os.str());
    }
    if (!std::isfinite(b.lambda.real()) || !std::isfinite(b.lambda.imag())) {
      os << "eigenvalue not finite";
      throw CanonError(ErrorCode::InvalidSpec, os.str());
    }
    if (b.kind == BlockKind::Real) {
      if (b.lambda.imag() != 0.0) {
        os << "REAL block with nonzero imaginary part";
        throw CanonError(ErrorCode::InvalidSpec, os.str());
      }
      if (b.sign != 1 && b.sign != -1) {
        os << "sign must be +1 or -1";
        throw CanonError(ErrorCode::InvalidSpec, os.str());
      }
    } else if (b.lambda.imag() == 0.0) {
      os << "PAIR block with real eigenvalue";
      throw CanonError(ErrorCode::InvalidSpec, os.str());
    }
  }
}

RMatrix anti_identity(int p) { return RMatrix::Identity(p, p).rowwise().reverse(); }

CMatrix jordan_block(Complex lambda, int p) {
  CMatrix j = CMatrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    j(i, i) = lambda;
    if (i + 1 < p) j(i, i + 1) = 1.0;
  }
  return j;
}

CMatrix build_J(const JordanSpec& spec) {
  const int n = spec.total_size();
  CMatrix j = CMatrix::Zero(n, n);
  const auto offs = spec.offsets();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& b = spec.blocks[k];
    j.block(offs[k], offs[k], b.size, b.size) = jordan_block(b.lambda, b.size);
    if (b.is_pair()) {
      j.block(offs[k] + b.size, offs[k] + b.size, b.size, b.size) =
          jordan_block(std::conj(b.lambda), b.size);
    }
  }
  return j;
}

CMatrix build_P(const JordanSpec& spec) {
  const int n = spec.total_size();
  CMatrix p = CMatrix::Zero(n, n);
  const auto offs = spec.offsets();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& b = spec.blocks[k];
    const double eps = b.is_pair() ? 1.0 : static_cast<double>(b.sign);
    p.block(offs[k], offs[k], b.dim(), b.dim()) = to_complex(eps * anti_identity(b.dim()));
  }
  return p;
}

RMatrix build_JR(const JordanSpec& spec) {
  const int n = spec.total_size();
  RMatrix jr = RMatrix::Zero(n, n);
  const auto offs = spec.offsets();
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& b = spec.blocks[k];
    const int o = offs[k];
    if (!b.is_pair()) {
      jr.block(o, o, b.size, b.size) = jordan_block(b.lambda, b.size).real();
      continue;
    }
    const double sigma = b.lambda.real();
    const double tau = b.lambda.imag();
    for (int c = 0; c < b.size; ++c) {
      const int r = o + 2 * c;
      jr(r, r) = sigma;
      jr(r, r + 1) = tau;
      jr(r + 1, r) = -tau;
      jr(r + 1, r + 1) = sigma;
      if (c + 1 < b.size) {
        jr(r, r + 2) = 1.0;
        jr(r + 1, r + 3) = 1.0;
      }
    }
  }
  return jr;
}

CMatrix build_S(const JordanSpec& spec) {
  const int n = spec.total_size();
  CMatrix s = CMatrix::Identity(n, n);
  const auto offs = spec.offsets();
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& b = spec.blocks[k];
    if (!b.is_pair()) continue;
    const int o = offs[k];
    const int p = b.size;
    s.block(o, o, 2 * p, 2 * p).setZero();
    for (int c = 0; c < p; ++c) {
      s(o + c, o + 2 * c) = h;
      s(o + c, o + 2 * c + 1) = -kI * h;
      s(o + p + c, o + 2 * c) = -kI * h;
      s(o + p + c, o + 2 * c + 1) = h;
    }
  }
  return s;
}

CMatrix build_S_inv(const JordanSpec& spec) {
  const int n = spec.total_size();
  CMatrix s = CMatrix::Identity(n, n);
  const auto offs = spec.offsets();
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& b = spec.blocks[k];
    if (!b.is_pair()) continue;
    const int o = offs[k];
    const int p = b.size;
    s.block(o, o, 2 * p, 2 * p).setZero();
    for (int c = 0; c < p; ++c) {
      s(o + 2 * c, o + c) = h;
      s(o + 2 * c, o + p + c) = kI * h;
      s(o + 2 * c + 1, o + c) = kI * h;
      s(o + 2 * c + 1, o + p + c) = h;
    }
  }
  return s;
}

double check_h_selfadjoint(const CMatrix& a, const CMatrix& h, double tol) {
  if (a.rows() != a.cols() || h.rows() != h.cols() || a.rows() != h.rows()) {
    throw CanonError(ErrorCode::NotHermitian, "A and H must be square and of equal size");
  }
  const double hnorm = spectral_norm(h);
  const double skew = spectral_norm(CMatrix(h - h.adjoint()));
  if (skew > tol * std::max(1.0, hnorm)) {
    std::ostringstream os;
    os << "||H - H*|| = " << skew;
    throw CanonError(ErrorCode::NotHermitian, os.str());
  }
  if (reciprocal_condition(h) < kSingularRcond) {
    throw CanonError(ErrorCode::SingularH, "H is numerically singular");
  }
  return spectral_norm(CMatrix(h * a - a.adjoint() * h));
}

double relative_selfadjoint_residual(const CMatrix& a, const CMatrix& h) {
  const double scale = spectral_norm(h) * spectral_norm(a);
  const double res = spectral_norm(CMatrix(h * a - a.adjoint() * h));
  return scale > 0.0 ? res / scale : res;
}

CsReport measure_cs(const CMatrix& n, const JordanSpec& spec) {
  if (n.rows() != n.cols() || n.cols() != spec.total_size()) {
    throw CanonError(ErrorCode::NotCs, "basis size does not match the Jordan structure");
  }
  CsReport report;
  const auto offs = spec.offsets();
  const double nnorm = spectral_norm(n);
  bool fitted = false;
  for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
    const auto& b = spec.blocks[k];
    if (!b.is_pair()) continue;
    const CMatrix q = n.middleCols(offs[k], b.size);
    const CMatrix w = n.middleCols(offs[k] + b.size, b.size);
    if (!fitted) {
      Eigen::Index r = 0;
      Eigen::Index c = 0;
      const double peak = q.cwiseAbs().maxCoeff(&r, &c);
      if (peak == 0.0) {
        report.gamma = Complex(0.0, 0.0);
        report.residual = std::numeric_limits<double>::infinity();
        report.worst_block = k;
        return report;
      }
      report.gamma = w(r, c) / std::conj(q(r, c));
      fitted = true;
    }
    const double diff = spectral_norm(CMatrix(w - report.gamma * q.conjugate()));
    const double res = nnorm > 0.0 ? diff / nnorm : diff;
    if (!report.worst_block || res > report.residual) {
      report.residual = res;
      report.worst_block = k;
    }
  }
  return report;
}

Complex check_cs(const CMatrix& n, const JordanSpec& spec, double tol) {
  const CsReport report = measure_cs(n, spec);
  if (report.residual > tol || std::abs(report.gamma) <= tol) {
    std::ostringstream os;
    os << "block " << report.worst_block.value_or(0) << " residual " << report.residual
       << " (gamma " << report.gamma << ")";
    throw CanonError(ErrorCode::NotCs, os.str());
  }
  return report.gamma;
}

bool same_jordan_structure(const JordanSpec& a, const JordanSpec& b) {
  using Key = std::tuple<int, int, int>;
  auto keys = [](const JordanSpec& s) {
    std::vector<Key> out;
    for (const auto& blk : s.blocks) {
      out.emplace_back(blk.is_pair() ? 1 : 0, blk.size, blk.is_pair() ? 0 : blk.sign);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return keys(a) == keys(b);
}

}  // namespace indefcanon
