#include "indefcanon/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "indefcanon/error.hpp"

namespace indefcanon::io {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw CanonError(ErrorCode::Parse, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

template <typename T>
T integer(const json& j, const char* what) {
  if (!j.is_number_integer()) parse_fail(std::string(what) + " must be an integer");
  return j.get<T>();
}

BasisRole role_from_string(const std::string& s) {
  for (BasisRole r : {BasisRole::RawChain, BasisRole::Fo, BasisRole::Focs, BasisRole::Rc}) {
    if (to_string(r) == s) return r;
  }
  parse_fail("unknown basis role '" + s + "'");
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  parse_fail("complex entries are numbers or [re, im] pairs");
}

json matrix_to_json(const CMatrix& m, bool real_form) {
  const bool real = real_form && max_imag(m) == 0.0;
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (real) {
        data.push_back(m(i, k).real());
      } else {
        data.push_back(complex_to_json(m(i, k)));
      }
    }
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const json& j) {
  const auto rows = integer<Eigen::Index>(field(j, "rows"), "rows");
  const auto cols = integer<Eigen::Index>(field(j, "cols"), "cols");
  const json& data = field(j, "data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    parse_fail("matrix data does not hold rows * cols entries");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(data[i * cols + k]);
  }
  return m;
}

json spec_to_json(const JordanSpec& spec) {
  json blocks = json::array();
  for (const auto& b : spec.blocks) {
    if (b.is_pair()) {
      blocks.push_back({{"kind", "pair"}, {"lambda", complex_to_json(b.lambda)}, {"size", b.size}});
    } else {
      blocks.push_back({{"kind", "real"}, {"lambda", b.lambda.real()}, {"size", b.size}, {"sign", b.sign}});
    }
  }
  return json{{"blocks", std::move(blocks)}};
}

JordanSpec spec_from_json(const json& j) {
  const json& blocks = field(j, "blocks");
  if (!blocks.is_array()) parse_fail("'blocks' must be an array");
  JordanSpec spec;
  for (const json& b : blocks) {
    const json& kind = field(b, "kind");
    if (!kind.is_string()) parse_fail("block kind must be a string");
    std::string k = kind.get<std::string>();
    for (char& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const int size = integer<int>(field(b, "size"), "size");
    if (k == "real") {
      const int sign = b.contains("sign") ? integer<int>(b.at("sign"), "sign") : 1;
      spec.blocks.push_back(BlockSpec::real(number(field(b, "lambda"), "lambda"), size, sign));
    } else if (k == "pair") {
      spec.blocks.push_back(BlockSpec::pair(complex_from_json(field(b, "lambda")), size));
    } else {
      parse_fail("block kind must be 'real' or 'pair'");
    }
  }
  try {
    spec.validate();
  } catch (const CanonError& e) {
    parse_fail(e.detail());
  }
  return spec;
}

json residuals_to_json(const AffiliationResiduals& r) {
  return json{{"similarity", r.similarity}, {"congruence", r.congruence}};
}

json basis_to_json(const CanonicalBasis& b, const JordanSpec& spec) {
  return json{{"role", to_string(b.role)},
              {"gamma", complex_to_json(b.gamma)},
              {"signs", b.signs},
              {"spec", spec_to_json(spec)},
              {"matrix", matrix_to_json(b.matrix, b.role == BasisRole::Rc)},
              {"certificate", residuals_to_json(b.residuals)}};
}

CanonicalBasis basis_from_json(const json& j) {
  CanonicalBasis b;
  b.matrix = matrix_from_json(field(j, "matrix"));
  if (j.contains("role")) {
    if (!j.at("role").is_string()) parse_fail("role must be a string");
    b.role = role_from_string(j.at("role").get<std::string>());
  }
  if (j.contains("gamma")) b.gamma = complex_from_json(j.at("gamma"));
  if (j.contains("signs")) {
    for (const json& s : j.at("signs")) b.signs.push_back(integer<int>(s, "sign"));
  }
  if (j.contains("certificate")) {
    const json& c = j.at("certificate");
    b.residuals.similarity = number(field(c, "similarity"), "similarity");
    b.residuals.congruence = number(field(c, "congruence"), "congruence");
  }
  return b;
}

json trace_to_json(const PipelineTrace& t) {
  return json{{"gamma", complex_to_json(t.gamma)}, {"Z1", matrix_to_json(t.z1)},     {"Z2", matrix_to_json(t.z2)},
              {"Z3", matrix_to_json(t.z3)},       {"Z4", matrix_to_json(t.z4)},     {"G", matrix_to_json(t.gram)},
              {"G1", matrix_to_json(t.gram1)},    {"G2", matrix_to_json(t.gram2)}, {"N", matrix_to_json(t.n)}};
}

json instance_to_json(const Instance& inst) {
  return json{{"spec", spec_to_json(inst.spec)},
              {"seed", inst.seed},
              {"kind", to_string(inst.kind)},
              {"gamma", complex_to_json(inst.gamma)},
              {"A0", matrix_to_json(to_complex(inst.a0), true)},
              {"H0", matrix_to_json(to_complex(inst.h0), true)},
              {"T0", basis_to_json(inst.t0, inst.spec)},
              {"W", matrix_to_json(to_complex(inst.generator), true)}};
}

Instance instance_from_json(const json& j) {
  Instance inst;
  inst.spec = spec_from_json(field(j, "spec"));
  inst.seed = integer<std::uint64_t>(field(j, "seed"), "seed");
  const json& kind = field(j, "kind");
  if (kind == "focs") {
    inst.kind = BasisKind::Focs;
  } else if (kind == "rc") {
    inst.kind = BasisKind::Rc;
  } else {
    parse_fail("instance kind must be 'focs' or 'rc'");
  }
  inst.gamma = complex_from_json(field(j, "gamma"));
  auto real_matrix = [&](const char* key) {
    const CMatrix m = matrix_from_json(field(j, key));
    if (max_imag(m) != 0.0) parse_fail(std::string(key) + " must be real");
    return RMatrix(m.real());
  };
  inst.a0 = real_matrix("A0");
  inst.h0 = real_matrix("H0");
  inst.generator = real_matrix("W");
  inst.t0 = basis_from_json(field(j, "T0"));
  const Eigen::Index n = inst.spec.total_size();
  for (const RMatrix* m : {&inst.a0, &inst.h0, &inst.generator}) {
    if (m->rows() != n || m->cols() != n) parse_fail("instance matrices do not match the spec size");
  }
  if (inst.t0.matrix.rows() != n || inst.t0.matrix.cols() != n) parse_fail("T0 does not match the spec size");
  return inst;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_trials_csv(std::ostream& os, const StabilityReport& rep) {
  const bool weak = rep.mode == PerturbMode::Weak;
  os << "delta,trial,input,output,ratio,z1_dev,z2_dev,z3_dev,z4_dev,status";
  if (weak) os << ",match_ok,matched_eigenvalues";
  os << '\n';
  for (const TrialRecord& t : rep.trials) {
    os << format_double(t.delta) << ',' << t.trial << ',' << format_double(t.input) << ','
       << format_double(t.output) << ',' << format_double(t.ratio);
    for (double z : t.z_dev) os << ',' << format_double(z);
    os << ',' << t.status;
    if (weak) {
      os << ',' << (t.match_ok ? (*t.match_ok ? "true" : "false") : "") << ',';
      for (std::size_t k = 0; k < t.matched.size(); ++k) {
        if (k) os << ';';
        os << format_double(t.matched[k].real()) << (t.matched[k].imag() < 0 ? "" : "+")
           << format_double(t.matched[k].imag()) << 'i';
      }
    }
    os << '\n';
  }
}

json report_to_json(const StabilityReport& rep) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); };
  json per_delta = json::array();
  for (const DeltaStats& s : rep.per_delta) {
    per_delta.push_back({{"delta", s.delta},
                         {"ok", s.ok},
                         {"failed", s.failed},
                         {"min_ratio", num(s.min)},
                         {"median_ratio", num(s.median)},
                         {"max_ratio", num(s.max)}});
  }
  json trials = json::array();
  for (const TrialRecord& t : rep.trials) {
    json row{{"delta", t.delta},          {"trial", t.trial},   {"input", num(t.input)},
             {"output", num(t.output)},   {"ratio", num(t.ratio)},
             {"z_dev", {num(t.z_dev[0]), num(t.z_dev[1]), num(t.z_dev[2]), num(t.z_dev[3])}},
             {"status", t.status}};
    if (t.match_ok) {
      row["match_ok"] = *t.match_ok;
      json m = json::array();
      for (Complex z : t.matched) m.push_back(complex_to_json(z));
      row["matched_eigenvalues"] = std::move(m);
    }
    trials.push_back(std::move(row));
  }
  json out{{"instance_seed", rep.instance_seed},
           {"mode", to_string(rep.mode)},
           {"kind", to_string(rep.kind)},
           {"K_hat", num(rep.k_hat)},
           {"spread", num(rep.spread)},
           {"boundedness_flag", rep.bounded},
           {"factor_spread", {num(rep.factor_spread[0]), num(rep.factor_spread[1]), num(rep.factor_spread[2]),
                              num(rep.factor_spread[3])}},
           {"factor_bounded", rep.factor_bounded},
           {"failed_trials", rep.failed_trials},
           {"degenerate_trials", rep.degenerate_trials},
           {"per_delta", std::move(per_delta)},
           {"trials", std::move(trials)}};
  if (rep.match_rate) out["match_rate"] = *rep.match_rate;
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace indefcanon::io
