#pragma once

// Stability experiments: generate a real H-selfadjoint instance with known
// structure, perturb it without changing that structure, re-canonize next to
// the reference basis and record ||N - T0|| / (||A - A0|| + ||H - H0||).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "indefcanon/focs.hpp"
#include "indefcanon/rc.hpp"

namespace indefcanon {

enum class PerturbMode { Strict, Weak };
enum class BasisKind { Focs, Rc };

std::string_view to_string(PerturbMode mode);
std::string_view to_string(BasisKind kind);

struct Instance {
  JordanSpec spec;
  RMatrix a0;
  RMatrix h0;
  /// W with W^{-1} A0 W = J_R and W^T H0 W = P; perturbations act on it.
  RMatrix generator;
  CanonicalBasis t0;
  BasisKind kind = BasisKind::Focs;
  Complex gamma{1.0, 0.0};
  std::uint64_t seed = 0;
};

struct GenOptions {
  BasisKind kind = BasisKind::Focs;
  Complex gamma{1.0, 0.0};
  double max_condition = 100.0;
  int max_draws = 100;
  /// Test hook: use this W instead of drawing one.
  std::optional<RMatrix> forced_generator;
  FocsOptions focs;
};

/// Throws InvalidSpec for specs outside the experiment's hypotheses (zero or
/// repeated eigenvalues), RetryExhausted when no well-conditioned W is found.
Instance gen_instance(const JordanSpec& spec, std::uint64_t seed, const GenOptions& opts = {});

/// Real pair (W J_R W^{-1}, W^{-T} P W^{-1}) with H symmetrized exactly.
std::pair<RMatrix, RMatrix> pair_from_generator(const RMatrix& w, const JordanSpec& spec);

struct Perturbation {
  RMatrix a;
  RMatrix h;
  JordanSpec spec;  ///< structure of A with its true (possibly moved) eigenvalues
  double input = 0.0;  ///< ||A - A0|| + ||H - H0||
};

/// delta == 0 returns (A0, H0) unchanged. Throws DeltaUnreachable when the
/// rescaling cannot bring the measured input under delta.
Perturbation perturb(const Instance& inst, double delta, PerturbMode mode, std::uint64_t seed,
                     NormKind norm = NormKind::Spectral);

struct EigenMatch {
  JordanSpec spec;               ///< spec0 with eigenvalues replaced by matched cluster means
  std::vector<Complex> matched;  ///< per block
};

/// Greedy nearest matching of spec eigenvalues to single-linkage clusters of
/// the spectrum of A. Throws AmbiguousMatch, KindMismatch, StructureMismatch.
EigenMatch match_eigenvalues(const JordanSpec& spec0, const CMatrix& a, double radius);

struct AnchoredResult {
  CanonicalBasis basis;
  PipelineTrace trace;  ///< of the underlying FOCS construction (gamma = i for RC)
  JordanSpec spec;      ///< spec actually used (matched in weak mode)
  std::optional<EigenMatch> match;
};

struct AnchorOptions {
  /// Clustering radius is max(cluster_scale * delta, cluster_floor).
  double cluster_scale = 10.0;
  double cluster_floor = 1e-2;
  double delta = 0.0;
  FocsOptions focs;
};

/// Canonical basis of (A, H) resolved toward the reference t0: Step-1 chains
/// aligned to t0 and the final per-block sign chosen closest to t0.
AnchoredResult anchored_canonize(const CMatrix& a, const CMatrix& h, const JordanSpec& spec0,
                                 const CMatrix& t0, BasisKind kind, Complex gamma, PerturbMode mode,
                                 const AnchorOptions& opts = {});

struct TrialRecord {
  std::size_t delta_index = 0;
  std::size_t trial = 0;
  double delta = 0.0;
  double input = 0.0;
  double output = 0.0;
  double ratio = 0.0;
  std::array<double, 4> z_dev{};  ///< ||Z1 - T0||, ||Z2 - I||, ||Z3 - I||, ||Z4 - I||
  std::string status = "ok";       ///< ok | degenerate | error:<CODE>
  std::vector<Complex> matched;    ///< weak mode
  std::optional<bool> match_ok;    ///< weak mode

  bool ok() const { return status == "ok"; }
};

struct DeltaStats {
  double delta = 0.0;
  std::size_t ok = 0;
  std::size_t failed = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct StabilityReport {
  std::uint64_t instance_seed = 0;
  PerturbMode mode = PerturbMode::Strict;
  BasisKind kind = BasisKind::Focs;
  std::vector<TrialRecord> trials;  ///< sorted by (delta index, trial)
  std::vector<DeltaStats> per_delta;
  double k_hat = 0.0;
  double spread = 0.0;  ///< max / min of per-delta median ratios
  bool bounded = false;
  std::array<double, 4> factor_spread{};
  bool factor_bounded = false;
  std::size_t failed_trials = 0;
  std::size_t degenerate_trials = 0;
  /// Weak mode: fraction of ok trials at delta <= 1e-3 whose matching was correct.
  std::optional<double> match_rate;
};

struct StabilityOptions {
  PerturbMode mode = PerturbMode::Strict;
  BasisKind kind = BasisKind::Focs;
  Complex gamma{1.0, 0.0};
  NormKind norm = NormKind::Spectral;
  double spread_threshold = 10.0;
  double delta_max = 0.1;
  unsigned jobs = 1;
  AnchorOptions anchor;
};

/// Deterministic per-trial seed.
std::uint64_t trial_seed(std::uint64_t instance_seed, std::size_t delta_index, std::size_t trial);

/// Reference basis for the requested kind: the instance's own T0 when it
/// matches, otherwise derived from it (R0 S^{-1} or T0 S for an i-FOCS T0)
/// or rebuilt from (A0, H0).
CMatrix reference_basis(const Instance& inst, BasisKind kind, Complex gamma);

/// Throws InvalidSpec when deltas are not strictly decreasing, exceed
/// delta_max or trials_per_delta is zero. Trial failures are recorded.
StabilityReport estimate_lipschitz(const Instance& inst, const std::vector<double>& deltas,
                                   std::size_t trials_per_delta, const StabilityOptions& opts = {});

/// Random spec for experiments: distinct nonzero eigenvalues separated by at
/// least 0.5, real blocks of size <= max_real_size, pair blocks of size <=
/// max_pair_size, total size in [min_n, max_n].
JordanSpec random_spec(std::uint64_t seed, int min_n, int max_n, int max_real_size = 3, int max_pair_size = 2);

}  // namespace indefcanon
