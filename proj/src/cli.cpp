#include "indefcanon/cli.hpp"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "indefcanon/error.hpp"
#include "indefcanon/io.hpp"

namespace indefcanon::cli {

namespace {

using io::json;

struct Problem {
  CMatrix a;
  CMatrix h;
  JordanSpec spec;
};

// (A, H, spec) from an Instance file or a bare {"A", "H", "spec"} object.
Problem load_problem(const std::string& path) {
  const json j = io::parse_json(io::read_file(path));
  Problem p;
  if (!j.is_object()) throw CanonError(ErrorCode::Parse, path + ": expected a JSON object");
  const bool instance = j.contains("A0");
  p.a = io::matrix_from_json(j.at(instance ? "A0" : "A"));
  if (!j.contains(instance ? "H0" : "H") || !j.contains("spec")) {
    throw CanonError(ErrorCode::Parse, path + ": needs A, H and spec");
  }
  p.h = io::matrix_from_json(j.at(instance ? "H0" : "H"));
  p.spec = io::spec_from_json(j.at("spec"));
  const Eigen::Index n = p.spec.total_size();
  if (p.a.rows() != n || p.a.cols() != n || p.h.rows() != n || p.h.cols() != n) {
    throw CanonError(ErrorCode::Parse, path + ": A and H must be square of the spec size");
  }
  return p;
}

BasisKind parse_kind(const std::string& s) {
  if (s == "focs") return BasisKind::Focs;
  if (s == "rc") return BasisKind::Rc;
  throw CanonError(ErrorCode::Parse, "kind must be focs or rc");
}

std::string trace_path(const std::string& out) {
  const std::string ext = ".json";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + ".trace.json";
  }
  return out + ".trace.json";
}

std::string summary_path(const std::string& csv) {
  const std::string ext = ".csv";
  if (csv.size() > ext.size() && csv.compare(csv.size() - ext.size(), ext.size(), ext) == 0) {
    return csv.substr(0, csv.size() - ext.size()) + ".json";
  }
  return csv + ".json";
}

// Runs body, mapping parse failures to kParse and write failures to kIo.
template <typename F>
int guarded(std::ostream& err, int failure_code, F&& body) {
  try {
    return body();
  } catch (const CanonError& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Parse ? kParse : failure_code;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace

Complex parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  auto fail = [&]() -> Complex { throw CanonError(ErrorCode::Parse, "cannot read '" + raw + "' as a complex number"); };
  if (s.empty()) return fail();
  if (s.front() == '[') {
    try {
      return io::complex_from_json(io::parse_json(s));
    } catch (const CanonError&) {
      return fail();
    }
  }
  auto to_double = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != t.size()) fail();
    return v;
  };
  if (s.back() != 'i') return {to_double(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(s)};
  return {to_double(s.substr(0, split)), to_double(s.substr(split))};
}

std::vector<double> parse_deltas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const Complex z = parse_complex(item);
    if (z.imag() != 0.0) throw CanonError(ErrorCode::Parse, "deltas are real");
    out.push_back(z.real());
  }
  if (out.empty()) throw CanonError(ErrorCode::Parse, "no deltas given");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!(out[k] < out[k - 1])) throw CanonError(ErrorCode::Parse, "deltas must be strictly decreasing");
  }
  return out;
}

int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err) {
  JordanSpec spec;
  GenOptions opts;
  const int parsed = guarded(err, kParse, [&] {
    spec = io::spec_from_json(io::parse_json(io::read_file(args.spec_file)));
    opts.kind = parse_kind(args.kind);
    opts.gamma = parse_complex(args.gamma);
    return kOk;
  });
  if (parsed != kOk) return parsed;
  return guarded(err, kGenerate, [&] {
    const Instance inst = gen_instance(spec, args.seed, opts);
    io::write_file_atomic(args.out_file, io::instance_to_json(inst).dump(2) + "\n");
    out << "wrote instance (n = " << spec.total_size() << ", seed " << args.seed << ") to " << args.out_file << '\n';
    return kOk;
  });
}

int cmd_canonize(const CanonizeArgs& args, std::ostream& out, std::ostream& err) {
  Problem p;
  Complex gamma;
  const int parsed = guarded(err, kParse, [&] {
    p = load_problem(args.in_file);
    gamma = parse_complex(args.gamma);
    if (args.mode != "fo" && args.mode != "focs" && args.mode != "rc") {
      throw CanonError(ErrorCode::Parse, "mode must be fo, focs or rc");
    }
    return kOk;
  });
  if (parsed != kOk) return parsed;

  return guarded(err, kPipeline, [&] {
    CanonicalBasis basis;
    std::optional<PipelineTrace> trace;
    if (args.mode == "fo") {
      const FoBasis fo = fo_basis(p.a, p.h, p.spec);
      basis.role = BasisRole::Fo;
      basis.matrix = fo.basis;
      basis.signs = fo.signs;
      basis.residuals = affiliation_residuals(p.a, p.h, fo.basis, build_J(p.spec), build_P(p.spec), args.norm);
    } else if (args.mode == "focs") {
      FocsResult r = focs_basis(p.a, p.h, p.spec, gamma);
      basis = std::move(r.basis);
      trace = std::move(r.trace);
    } else {
      RcResult r = rc_basis(p.a, p.h, p.spec);
      basis = std::move(r.basis);
      trace = std::move(r.focs.trace);
    }
    io::write_file_atomic(args.out_file, io::basis_to_json(basis, p.spec).dump(2) + "\n");
    if (args.emit_trace) {
      if (trace) {
        io::write_file_atomic(trace_path(args.out_file), io::trace_to_json(*trace).dump(2) + "\n");
      } else {
        err << "note: mode fo has no pipeline trace\n";
      }
    }
    out << to_string(basis.role) << " basis written to " << args.out_file << " (similarity "
        << basis.residuals.similarity << ", congruence " << basis.residuals.congruence << ")\n";
    return kOk;
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  Problem p;
  CanonicalBasis basis;
  std::string expect = args.expect;
  const int parsed = guarded(err, kParse, [&] {
    p = load_problem(args.in_file);
    basis = io::basis_from_json(io::parse_json(io::read_file(args.basis_file)));
    if (expect.empty()) expect = std::string(to_string(basis.role));
    if (expect != "fo" && expect != "focs" && expect != "rc") {
      throw CanonError(ErrorCode::Parse, "can only verify fo, focs or rc bases");
    }
    const Eigen::Index n = p.spec.total_size();
    if (basis.matrix.rows() != n || basis.matrix.cols() != n) {
      throw CanonError(ErrorCode::Parse, "basis size does not match the spec");
    }
    return kOk;
  });
  if (parsed != kOk) return parsed;

  struct Row {
    std::string name;
    double value;
    std::string note;
  };
  std::vector<Row> rows;
  const double hnorm = matrix_norm(p.h, args.norm);
  rows.push_back({"hermitian", matrix_norm(p.h - p.h.adjoint(), args.norm) / std::max(1.0, hnorm), ""});
  rows.push_back({"selfadjoint", relative_selfadjoint_residual(p.a, p.h), ""});
  const CMatrix& t = basis.matrix;
  const CMatrix j = expect == "rc" ? to_complex(build_JR(p.spec)) : build_J(p.spec);
  const AffiliationResiduals res = affiliation_residuals(p.a, p.h, t, j, build_P(p.spec), args.norm);
  rows.push_back({"similarity", res.similarity, ""});
  rows.push_back({"congruence", res.congruence, ""});
  if (expect == "focs" && p.spec.has_pairs()) {
    const CsReport cs = measure_cs(t, p.spec);
    std::ostringstream note;
    note << "gamma = " << cs.gamma;
    rows.push_back({"cs", cs.residual, note.str()});
  }
  if (expect == "rc") {
    rows.push_back({"realness", max_imag(t) / std::max(1.0, spectral_norm(t)), ""});
    if (p.spec.has_pairs()) {
      const CsReport cs = measure_cs(t * build_S_inv(p.spec), p.spec);
      rows.push_back({"cs", cs.residual, ""});
      rows.push_back({"gamma_is_i", std::abs(cs.gamma - Complex(0.0, 1.0)), ""});
    }
  }

  bool pass = true;
  out << std::left << std::setw(12) << "check" << std::setw(14) << "residual" << "status\n";
  for (const Row& r : rows) {
    const bool ok = std::isfinite(r.value) && r.value <= args.tol;
    pass = pass && ok;
    out << std::setw(12) << r.name << std::setw(14) << std::setprecision(3) << std::scientific << r.value
        << (ok ? "pass" : "FAIL");
    if (!r.note.empty()) out << "  " << r.note;
    out << '\n';
  }
  out << std::defaultfloat << (pass ? "all residuals within " : "residual breach at tol ") << args.tol << '\n';
  return pass ? kOk : kBreach;
}

int cmd_stability(const StabilityArgs& args, std::ostream& out, std::ostream& err) {
  Instance inst;
  std::vector<double> deltas;
  StabilityOptions opts;
  const int parsed = guarded(err, kParse, [&] {
    inst = io::instance_from_json(io::parse_json(io::read_file(args.in_file)));
    deltas = parse_deltas(args.deltas);
    if (args.trials == 0) throw CanonError(ErrorCode::Parse, "trials must be at least 1");
    if (args.mode == "strict") {
      opts.mode = PerturbMode::Strict;
    } else if (args.mode == "weak") {
      opts.mode = PerturbMode::Weak;
    } else {
      throw CanonError(ErrorCode::Parse, "mode must be strict or weak");
    }
    opts.kind = parse_kind(args.kind);
    opts.gamma = args.gamma ? parse_complex(*args.gamma) : inst.gamma;
    if (deltas.front() > args.delta_max || deltas.back() < 0.0) {
      throw CanonError(ErrorCode::Parse, "deltas must lie in [0, delta_max]");
    }
    return kOk;
  });
  if (parsed != kOk) return parsed;
  opts.jobs = args.jobs;
  opts.norm = args.norm;
  opts.delta_max = args.delta_max;

  return guarded(err, kParse, [&] {
    const StabilityReport rep = estimate_lipschitz(inst, deltas, args.trials, opts);
    std::ostringstream csv;
    io::write_trials_csv(csv, rep);
    io::write_file_atomic(args.out_csv, csv.str());
    const std::string summary = args.summary_json.empty() ? summary_path(args.out_csv) : args.summary_json;
    io::write_file_atomic(summary, io::report_to_json(rep).dump(2) + "\n");
    out << "K_hat " << rep.k_hat << ", median-ratio spread " << rep.spread << ", "
        << (rep.bounded ? "bounded" : "NOT bounded") << " (" << rep.failed_trials << " failed, "
        << rep.degenerate_trials << " degenerate trials)\n";
    return rep.bounded ? kOk : kBreach;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flipped-orthogonal conjugate-symmetric and real canonical bases for H-selfadjoint matrices"};
  app.require_subcommand(1);
  app.fallthrough();

  double tol = kDefaultTol;
  std::string norm = "spectral";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  app.add_option("--tol", tol, "Residual tolerance for verify")->envname("INDEFCANON_TOL");
  app.add_option("--norm", norm, "Matrix norm for residuals and ratios")
      ->check(CLI::IsMember({"spectral", "frobenius"}))
      ->envname("INDEFCANON_NORM");
  app.add_option("--seed", seed, "Seed for gen")->envname("INDEFCANON_SEED");
  app.add_option("--jobs", jobs, "Worker threads for stability")->envname("INDEFCANON_JOBS");

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a random instance with a given Jordan structure");
  gen_cmd->add_option("spec", gen.spec_file, "JordanSpec JSON file")->required();
  gen_cmd->add_option("-o,--out", gen.out_file, "Instance JSON output")->required();
  gen_cmd->add_option("--kind", gen.kind, "Reference basis kind")->check(CLI::IsMember({"focs", "rc"}));
  gen_cmd->add_option("--gamma", gen.gamma, "Gamma of a focs reference basis")->envname("INDEFCANON_GAMMA");

  CanonizeArgs can;
  CLI::App* can_cmd = app.add_subcommand("canonize", "Compute an fo, focs or rc basis");
  can_cmd->add_option("input", can.in_file, "Instance or {A, H, spec} JSON file")->required();
  can_cmd->add_option("-o,--out", can.out_file, "Basis JSON output")->required();
  can_cmd->add_option("--mode", can.mode, "Basis kind")->check(CLI::IsMember({"fo", "focs", "rc"}));
  can_cmd->add_option("--gamma", can.gamma, "Gamma for focs, e.g. 1, i, 0.6+0.8i")->envname("INDEFCANON_GAMMA");
  can_cmd->add_flag("--emit-trace", can.emit_trace, "Also write the pipeline trace")
      ->envname("INDEFCANON_EMIT_TRACE");

  VerifyArgs ver;
  CLI::App* ver_cmd = app.add_subcommand("verify", "Check a basis against (A, H)");
  ver_cmd->add_option("input", ver.in_file, "Instance or {A, H, spec} JSON file")->required();
  ver_cmd->add_option("basis", ver.basis_file, "Basis JSON file")->required();
  ver_cmd->add_option("--expect", ver.expect, "Role to verify against (default: the file's role)")
      ->check(CLI::IsMember({"fo", "focs", "rc"}));

  StabilityArgs st;
  std::string st_gamma;
  CLI::App* st_cmd = app.add_subcommand("stability", "Empirical Lipschitz experiment on an instance");
  st_cmd->add_option("input", st.in_file, "Instance JSON file")->required();
  st_cmd->add_option("-o,--out", st.out_csv, "Per-trial CSV output")->required();
  st_cmd->add_option("--summary", st.summary_json, "JSON summary output (default: CSV path with .json)");
  st_cmd->add_option("--deltas", st.deltas, "Strictly decreasing comma-separated deltas");
  st_cmd->add_option("--trials", st.trials, "Trials per delta");
  st_cmd->add_option("--mode", st.mode, "Perturbation model")->check(CLI::IsMember({"strict", "weak"}));
  st_cmd->add_option("--kind", st.kind, "Basis kind")->check(CLI::IsMember({"focs", "rc"}));
  st_cmd->add_option("--gamma", st_gamma, "Gamma for focs (default: the instance's)");
  st_cmd->add_option("--delta-max", st.delta_max, "Largest admissible delta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }

  const NormKind norm_kind = norm == "frobenius" ? NormKind::Frobenius : NormKind::Spectral;
  if (gen_cmd->parsed()) {
    gen.seed = seed;
    return cmd_gen(gen, out, err);
  }
  if (can_cmd->parsed()) {
    can.norm = norm_kind;
    return cmd_canonize(can, out, err);
  }
  if (ver_cmd->parsed()) {
    ver.tol = tol;
    ver.norm = norm_kind;
    return cmd_verify(ver, out, err);
  }
  st.jobs = jobs;
  st.norm = norm_kind;
  if (!st_gamma.empty()) st.gamma = st_gamma;
  return cmd_stability(st, out, err);
}

}  // namespace indefcanon::cli
