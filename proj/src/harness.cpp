#include "indefcanon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "indefcanon/error.hpp"

namespace indefcanon {

std::string_view to_string(PerturbMode mode) { return mode == PerturbMode::Strict ? "strict" : "weak"; }

std::string_view to_string(BasisKind kind) { return kind == BasisKind::Focs ? "focs" : "rc"; }

namespace {

constexpr Complex kI{0.0, 1.0};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RMatrix uniform_matrix(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = u(rng);
  }
  return m;
}

// Eigenvalues of J with their conjugates, one entry per distinct value.
std::vector<Complex> distinct_eigenvalues(const JordanSpec& spec) {
  std::vector<Complex> out;
  for (const auto& b : spec.blocks) {
    out.push_back(b.lambda);
    if (b.is_pair()) out.push_back(std::conj(b.lambda));
  }
  return out;
}

void check_experiment_spec(const JordanSpec& spec) {
  spec.validate();
  const auto eig = distinct_eigenvalues(spec);
  for (std::size_t i = 0; i < eig.size(); ++i) {
    if (eig[i] == Complex(0.0, 0.0)) {
      throw CanonError(ErrorCode::InvalidSpec, "zero eigenvalue: A must be invertible");
    }
    for (std::size_t j = i + 1; j < eig.size(); ++j) {
      if (eig[i] == eig[j]) {
        throw CanonError(ErrorCode::InvalidSpec, "one Jordan block per distinct eigenvalue is supported");
      }
    }
  }
}

CanonicalBasis canonize(const CMatrix& a, const CMatrix& h, const JordanSpec& spec, BasisKind kind,
                        Complex gamma, const FocsOptions& opts, PipelineTrace* trace = nullptr) {
  if (kind == BasisKind::Rc) {
    RcResult r = rc_basis(a, h, spec, opts);
    if (trace) *trace = std::move(r.focs.trace);
    return std::move(r.basis);
  }
  FocsResult f = focs_basis(a, h, spec, gamma, opts);
  if (trace) *trace = std::move(f.trace);
  return std::move(f.basis);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// max / min of positive medians; 1 when every median is zero, inf when
// only some are.
double spread_of(const std::vector<double>& medians) {
  if (medians.empty()) return std::numeric_limits<double>::infinity();
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  if (*hi == 0.0) return 1.0;
  if (*lo == 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

}  // namespace

std::pair<RMatrix, RMatrix> pair_from_generator(const RMatrix& w, const JordanSpec& spec) {
  const int n = spec.total_size();
  if (w.rows() != n || w.cols() != n) throw CanonError(ErrorCode::StructureMismatch, "generator has the wrong size");
  const RMatrix winv = solve(w, RMatrix::Identity(n, n));
  RMatrix a = w * build_JR(spec) * winv;
  RMatrix h = winv.transpose() * build_P(spec).real() * winv;
  h = 0.5 * (h + h.transpose()).eval();
  return {std::move(a), std::move(h)};
}

Instance gen_instance(const JordanSpec& spec, std::uint64_t seed, const GenOptions& opts) {
  check_experiment_spec(spec);
  const int n = spec.total_size();
  Instance inst;
  inst.spec = spec;
  inst.seed = seed;
  inst.kind = opts.kind;
  inst.gamma = opts.kind == BasisKind::Rc ? kI : opts.gamma;

  if (opts.forced_generator) {
    inst.generator = *opts.forced_generator;
  } else {
    std::mt19937_64 rng(seed);
    bool found = false;
    for (int draw = 0; draw < opts.max_draws && !found; ++draw) {
      inst.generator = uniform_matrix(rng, n);
      const double rc = reciprocal_condition(to_complex(inst.generator));
      found = rc > 0.0 && 1.0 / rc < opts.max_condition;
    }
    if (!found) {
      std::ostringstream os;
      os << "no generator with condition below " << opts.max_condition << " in " << opts.max_draws << " draws";
      throw CanonError(ErrorCode::RetryExhausted, os.str());
    }
  }
  std::tie(inst.a0, inst.h0) = pair_from_generator(inst.generator, spec);
  inst.t0 = canonize(to_complex(inst.a0), to_complex(inst.h0), spec, inst.kind, inst.gamma, opts.focs);
  return inst;
}

Perturbation perturb(const Instance& inst, double delta, PerturbMode mode, std::uint64_t seed, NormKind norm) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw CanonError(ErrorCode::InvalidSpec, "delta must be finite and >= 0");
  Perturbation out{inst.a0, inst.h0, inst.spec, 0.0};
  if (delta == 0.0) return out;

  const int n = inst.spec.total_size();
  std::mt19937_64 rng(seed);
  RMatrix dw = uniform_matrix(rng, n);
  dw /= spectral_norm(dw);
  std::vector<Complex> eta(inst.spec.blocks.size());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 0; k < eta.size(); ++k) {
    if (inst.spec.blocks[k].is_pair()) {
      eta[k] = std::polar(std::abs(u(rng)), std::numbers::pi * u(rng));
    } else {
      eta[k] = u(rng);
    }
  }

  auto build = [&](double scale) {
    Perturbation p{RMatrix(), RMatrix(), inst.spec, 0.0};
    if (mode == PerturbMode::Weak) {
      for (std::size_t k = 0; k < eta.size(); ++k) p.spec.blocks[k].lambda += scale * (delta / 10.0) * eta[k];
    }
    std::tie(p.a, p.h) = pair_from_generator(inst.generator + scale * delta * dw, p.spec);
    p.input = matrix_norm(to_complex(p.a - inst.a0), norm) + matrix_norm(to_complex(p.h - inst.h0), norm);
    return p;
  };

  Perturbation full = build(1.0);
  if (full.input <= delta) return full;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (build(mid).input <= delta ? lo : hi) = mid;
  }
  if (lo == 0.0) {
    throw CanonError(ErrorCode::DeltaUnreachable, "perturbation cannot be scaled under delta");
  }
  return build(lo);
}

EigenMatch match_eigenvalues(const JordanSpec& spec0, const CMatrix& a, double radius) {
  spec0.validate();
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  const CVector mu = es.eigenvalues();
  const Eigen::Index m = mu.size();

  // Single-linkage clustering with union-find.
  std::vector<Eigen::Index> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (std::abs(mu(i) - mu(j)) <= radius) parent[find(i)] = find(j);
    }
  }
  struct Cluster {
    Complex center{};
    int size = 0;
    bool used = false;
  };
  std::vector<Cluster> clusters;
  std::vector<Eigen::Index> root_of;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index r = find(i);
    auto it = std::find(root_of.begin(), root_of.end(), r);
    if (it == root_of.end()) {
      root_of.push_back(r);
      clusters.push_back({});
      it = root_of.end() - 1;
    }
    Cluster& c = clusters[it - root_of.begin()];
    c.center += mu(i);
    ++c.size;
  }
  for (auto& c : clusters) c.center /= static_cast<double>(c.size);

  std::size_t expected = 0;
  for (const auto& b : spec0.blocks) expected += b.is_pair() ? 2 : 1;
  if (clusters.size() != expected) {
    std::ostringstream os;
    os << clusters.size() << " eigenvalue clusters at radius " << radius << ", spec has " << expected;
    throw CanonError(ErrorCode::StructureMismatch, os.str());
  }

  auto nearest = [&](Complex z, double* d1, double* d2) {
    std::size_t best = clusters.size();
    *d1 = *d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (clusters[c].used) continue;
      const double d = std::abs(clusters[c].center - z);
      if (d < *d1) {
        *d2 = *d1;
        *d1 = d;
        best = c;
      } else if (d < *d2) {
        *d2 = d;
      }
    }
    return best;
  };

  EigenMatch out;
  out.spec = spec0;
  for (std::size_t k = 0; k < spec0.blocks.size(); ++k) {
    BlockSpec& blk = out.spec.blocks[k];
    double d1 = 0.0;
    double d2 = 0.0;
    const std::size_t c = nearest(blk.lambda, &d1, &d2);
    if (d2 < 2.0 * d1) {
      std::ostringstream os;
      os << "block " << k << ": eigenvalue " << blk.lambda << " has two candidates at " << d1 << " and " << d2;
      throw CanonError(ErrorCode::AmbiguousMatch, os.str());
    }
    Cluster& cl = clusters[c];
    const bool cluster_real = std::abs(cl.center.imag()) <= radius;
    if (cluster_real == blk.is_pair()) {
      std::ostringstream os;
      os << "block " << k << ": " << (blk.is_pair() ? "PAIR" : "REAL") << " eigenvalue " << blk.lambda
         << " matched cluster " << cl.center;
      throw CanonError(ErrorCode::KindMismatch, os.str());
    }
    if (cl.size != blk.size) {
      std::ostringstream os;
      os << "block " << k << ": cluster at " << cl.center << " holds " << cl.size << " eigenvalues, expected "
         << blk.size;
      throw CanonError(ErrorCode::StructureMismatch, os.str());
    }
    cl.used = true;
    if (!blk.is_pair()) {
      blk.lambda = Complex(cl.center.real(), 0.0);
    } else {
      const std::size_t cc = nearest(std::conj(cl.center), &d1, &d2);
      if (cc == clusters.size() || clusters[cc].size != blk.size) {
        throw CanonError(ErrorCode::StructureMismatch, "conjugate cluster missing");
      }
      clusters[cc].used = true;
      blk.lambda = 0.5 * (cl.center + std::conj(clusters[cc].center));
    }
    out.matched.push_back(blk.lambda);
  }
  return out;
}

AnchoredResult anchored_canonize(const CMatrix& a, const CMatrix& h, const JordanSpec& spec0, const CMatrix& t0,
                                 BasisKind kind, Complex gamma, PerturbMode mode, const AnchorOptions& opts) {
  AnchoredResult out;
  out.spec = spec0;
  if (mode == PerturbMode::Weak) {
    out.match = match_eigenvalues(spec0, a, std::max(opts.cluster_scale * opts.delta, opts.cluster_floor));
    out.spec = out.match->spec;
  }
  FocsOptions focs = opts.focs;
  focs.anchor = t0;
  out.basis = canonize(a, h, out.spec, kind, gamma, focs, &out.trace);
  out.basis.matrix = sign_align(out.basis.matrix, t0, out.spec);
  return out;
}

std::uint64_t trial_seed(std::uint64_t instance_seed, std::size_t delta_index, std::size_t trial) {
  return splitmix64(instance_seed ^ splitmix64((static_cast<std::uint64_t>(delta_index) << 32) ^ trial));
}

CMatrix reference_basis(const Instance& inst, BasisKind kind, Complex gamma) {
  const CMatrix& t0 = inst.t0.matrix;
  if (kind == inst.kind && (kind == BasisKind::Rc || gamma == inst.gamma)) return t0;
  if (kind == BasisKind::Focs && inst.kind == BasisKind::Rc && gamma == kI) return t0 * build_S_inv(inst.spec);
  if (kind == BasisKind::Rc && inst.kind == BasisKind::Focs && inst.gamma == kI) {
    return rc_from_focs(t0, inst.spec);
  }
  return canonize(to_complex(inst.a0), to_complex(inst.h0), inst.spec, kind, gamma, {}).matrix;
}

StabilityReport estimate_lipschitz(const Instance& inst, const std::vector<double>& deltas,
                                   std::size_t trials_per_delta, const StabilityOptions& opts) {
  if (deltas.empty() || trials_per_delta == 0) {
    throw CanonError(ErrorCode::InvalidSpec, "need at least one delta and one trial");
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] >= 0.0) || deltas[i] > opts.delta_max || (i > 0 && !(deltas[i] < deltas[i - 1]))) {
      throw CanonError(ErrorCode::InvalidSpec, "deltas must be strictly decreasing within [0, delta_max]");
    }
  }

  const Complex gamma = opts.kind == BasisKind::Rc ? kI : opts.gamma;
  const CMatrix ref = reference_basis(inst, opts.kind, gamma);
  const CMatrix ref_focs = opts.kind == BasisKind::Rc ? CMatrix(ref * build_S_inv(inst.spec)) : ref;
  const int n = inst.spec.total_size();
  const CMatrix eye = CMatrix::Identity(n, n);

  StabilityReport rep;
  rep.instance_seed = inst.seed;
  rep.mode = opts.mode;
  rep.kind = opts.kind;
  rep.trials.resize(deltas.size() * trials_per_delta);

  auto run_trial = [&](std::size_t idx) {
    TrialRecord& rec = rep.trials[idx];
    rec.delta_index = idx / trials_per_delta;
    rec.trial = idx % trials_per_delta;
    rec.delta = deltas[rec.delta_index];
    try {
      const Perturbation pert =
          perturb(inst, rec.delta, opts.mode, trial_seed(inst.seed, rec.delta_index, rec.trial), opts.norm);
      rec.input = pert.input;
      AnchorOptions anchor = opts.anchor;
      anchor.delta = rec.delta;
      const AnchoredResult res =
          anchored_canonize(to_complex(pert.a), to_complex(pert.h), inst.spec, ref, opts.kind, gamma, opts.mode, anchor);
      rec.output = matrix_norm(res.basis.matrix - ref, opts.norm);
      rec.z_dev = {matrix_norm(res.trace.z1 - ref_focs, opts.norm), matrix_norm(res.trace.z2 - eye, opts.norm),
                   matrix_norm(res.trace.z3 - eye, opts.norm), matrix_norm(res.trace.z4 - eye, opts.norm)};
      if (res.match) {
        rec.matched = res.match->matched;
        const auto truth = distinct_eigenvalues(pert.spec);
        bool ok = true;
        for (std::size_t k = 0; k < rec.matched.size(); ++k) {
          std::size_t best = 0;
          for (std::size_t e = 1; e < truth.size(); ++e) {
            if (std::abs(truth[e] - rec.matched[k]) < std::abs(truth[best] - rec.matched[k])) best = e;
          }
          ok = ok && truth[best] == pert.spec.blocks[k].lambda;
        }
        rec.match_ok = ok;
      }
      if (rec.input == 0.0) {
        rec.status = "degenerate";
        rec.ratio = std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.ratio = rec.output / rec.input;
      }
    } catch (const CanonError& e) {
      rec.status = "error:" + std::string(to_string(e.code()));
      rec.ratio = std::numeric_limits<double>::quiet_NaN();
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(rep.trials.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < rep.trials.size(); ++i) run_trial(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rep.trials.size(); i = next++) run_trial(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<double> medians;
  std::array<std::vector<double>, 4> factor_medians;
  bool every_delta_ok = true;
  bool all_finite_ratios = true;
  std::size_t match_total = 0;
  std::size_t match_good = 0;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    DeltaStats st;
    st.delta = deltas[d];
    std::vector<double> ratios;
    std::array<std::vector<double>, 4> factors;
    for (std::size_t t = 0; t < trials_per_delta; ++t) {
      const TrialRecord& rec = rep.trials[d * trials_per_delta + t];
      if (rec.status == "degenerate") {
        ++rep.degenerate_trials;
        continue;
      }
      if (!rec.ok()) {
        ++st.failed;
        continue;
      }
      ++st.ok;
      all_finite_ratios = all_finite_ratios && std::isfinite(rec.ratio);
      ratios.push_back(rec.ratio);
      for (int f = 0; f < 4; ++f) factors[f].push_back(rec.z_dev[f] / rec.input);
      rep.k_hat = std::max(rep.k_hat, rec.ratio);
      if (rec.match_ok && rec.delta <= 1e-3) {
        ++match_total;
        match_good += *rec.match_ok ? 1 : 0;
      }
    }
    rep.failed_trials += st.failed;
    if (!ratios.empty()) {
      st.min = *std::min_element(ratios.begin(), ratios.end());
      st.max = *std::max_element(ratios.begin(), ratios.end());
      st.median = median(ratios);
      medians.push_back(st.median);
      for (int f = 0; f < 4; ++f) factor_medians[f].push_back(median(factors[f]));
    } else if (deltas[d] > 0.0) {
      every_delta_ok = false;
    }
    rep.per_delta.push_back(st);
  }

  rep.spread = spread_of(medians);
  rep.bounded = every_delta_ok && all_finite_ratios && rep.spread < opts.spread_threshold;
  rep.factor_bounded = every_delta_ok;
  for (int f = 0; f < 4; ++f) {
    rep.factor_spread[f] = spread_of(factor_medians[f]);
    rep.factor_bounded = rep.factor_bounded && rep.factor_spread[f] < opts.spread_threshold;
  }
  if (opts.mode == PerturbMode::Weak && match_total > 0) {
    rep.match_rate = static_cast<double>(match_good) / static_cast<double>(match_total);
  }
  return rep;
}

JordanSpec random_spec(std::uint64_t seed, int min_n, int max_n, int max_real_size, int max_pair_size) {
  if (min_n < 1 || max_n < min_n || max_real_size < 1 || max_pair_size < 1) {
    throw CanonError(ErrorCode::InvalidSpec, "bad random spec bounds");
  }
  std::mt19937_64 rng(seed);
  const int n = std::uniform_int_distribution<int>(min_n, max_n)(rng);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> neg(-3.0, -0.5);
  JordanSpec spec;
  std::vector<Complex> taken;
  auto separated = [&](Complex z) {
    if (std::abs(z) < 0.5) return false;
    return std::all_of(taken.begin(), taken.end(), [&](Complex t) { return std::abs(t - z) >= 0.5; });
  };
  int remaining = n;
  while (remaining > 0) {
    const bool pair = remaining >= 2 && std::bernoulli_distribution(0.5)(rng);
    Complex lambda;
    for (int tries = 0;; ++tries) {
      if (tries == 1000) throw CanonError(ErrorCode::RetryExhausted, "could not place separated eigenvalues");
      lambda = pair ? Complex(u(rng), neg(rng)) : Complex(u(rng), 0.0);
      if (separated(lambda) && (!pair || separated(std::conj(lambda)))) break;
    }
    taken.push_back(lambda);
    if (pair) {
      taken.push_back(std::conj(lambda));
      const int p = std::uniform_int_distribution<int>(1, std::min(max_pair_size, remaining / 2))(rng);
      spec.blocks.push_back(BlockSpec::pair(lambda, p));
      remaining -= 2 * p;
    } else {
      const int p = std::uniform_int_distribution<int>(1, std::min(max_real_size, remaining))(rng);
      spec.blocks.push_back(BlockSpec::real(lambda.real(), p, std::bernoulli_distribution(0.5)(rng) ? 1 : -1));
      remaining -= p;
    }
  }
  return spec;
}

}  // namespace indefcanon
