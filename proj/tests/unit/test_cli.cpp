#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "indefcanon/cli.hpp"
#include "indefcanon/io.hpp"

using namespace indefcanon;
namespace fs = std::filesystem;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("indefcanon_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
};

int run(std::vector<std::string> args, std::string* output = nullptr) {
  args.insert(args.begin(), "indefcanon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (output) *output = out.str() + err.str();
  return code;
}

std::string slurp(const std::string& path) { return io::read_file(path); }

std::string fixture_problem() {
  io::json j;
  j["A"] = io::matrix_to_json(to_complex(fixtures::A()), true);
  j["H"] = io::matrix_to_json(to_complex(fixtures::H()), true);
  j["spec"] = io::spec_to_json(fixtures::spec());
  return j.dump();
}

std::string basis_file(const CMatrix& m, const char* role) {
  io::json j;
  j["role"] = role;
  j["matrix"] = io::matrix_to_json(m);
  return j.dump();
}

}  // namespace

TEST_CASE("complex and delta parsing") {
  CHECK(cli::parse_complex("1") == Complex(1, 0));
  CHECK(cli::parse_complex("i") == Complex(0, 1));
  CHECK(cli::parse_complex("-i") == Complex(0, -1));
  CHECK(cli::parse_complex("0.5-2.5i") == Complex(0.5, -2.5));
  CHECK(cli::parse_complex("1e-3+1e+2i") == Complex(1e-3, 1e2));
  CHECK(cli::parse_complex("[3, 4]") == Complex(3, 4));
  CHECK_THROWS(cli::parse_complex("abc"));
  CHECK(cli::parse_deltas("1e-2,1e-3") == std::vector<double>{1e-2, 1e-3});
  CHECK_THROWS(cli::parse_deltas("1e-3,1e-2"));
}

TEST_CASE("gen is deterministic and checks its input") {
  Workdir w;
  const std::string spec = w.write("spec.json", io::spec_to_json(random_spec(3, 3, 6)).dump());
  CHECK(run({"gen", spec, "-o", w.path("a.json"), "--seed", "7"}) == 0);
  CHECK(run({"gen", spec, "-o", w.path("b.json"), "--seed", "7"}) == 0);
  CHECK(slurp(w.path("a.json")) == slurp(w.path("b.json")));
  CHECK_FALSE(fs::exists(w.path("a.json.tmp")));

  CHECK(run({"gen", w.write("bad.json", "{\"blocks\": ["), "-o", w.path("c.json")}) == 2);
  const std::string zero = w.write("zero.json", R"({"blocks": [{"kind": "real", "lambda": 0, "size": 2, "sign": 1}]})");
  CHECK(run({"gen", zero, "-o", w.path("d.json")}) == 3);
  CHECK_FALSE(fs::exists(w.path("d.json")));
  CHECK(run({"gen"}) == 2);
}

TEST_CASE("canonize and verify the fixture pair") {
  Workdir w;
  const std::string prob = w.write("prob.json", fixture_problem());
  std::string out;
  CHECK(run({"canonize", prob, "--mode", "focs", "--gamma", "1", "-o", w.path("n.json"), "--emit-trace"}) == 0);
  const io::json basis = io::parse_json(slurp(w.path("n.json")));
  CHECK(basis["certificate"]["similarity"].get<double>() <= 1e-10);
  CHECK(basis["certificate"]["congruence"].get<double>() <= 1e-10);
  CHECK(fs::exists(w.path("n.trace.json")));
  CHECK(run({"verify", prob, w.path("n.json")}, &out) == 0);

  CHECK(run({"canonize", prob, "--mode", "rc", "-o", w.path("r.json")}) == 0);
  CHECK(io::parse_json(slurp(w.path("r.json")))["matrix"]["data"][0].is_number());
  CHECK(run({"verify", prob, w.path("r.json")}) == 0);

  CHECK(run({"canonize", prob, "--mode", "fo", "-o", w.path("f.json")}) == 0);
  CHECK(run({"verify", prob, w.path("f.json")}) == 0);
}

TEST_CASE("verify accepts T and rejects L as flipped orthogonal") {
  Workdir w;
  const std::string prob = w.write("prob.json", fixture_problem());
  std::string out;
  CHECK(run({"verify", prob, w.write("t.json", basis_file(fixtures::T(), "fo"))}) == 0);
  CHECK(run({"verify", prob, w.write("l.json", basis_file(fixtures::L(), "fo"))}, &out) == 1);
  CHECK(out.find("congruence") != std::string::npos);
  CMatrix tampered = fixtures::M();
  tampered(1, 2) += 0.1;
  CHECK(run({"verify", prob, w.write("m.json", basis_file(tampered, "focs"))}) == 1);
  CHECK(run({"verify", prob, w.write("junk.json", "[")}) == 2);
}

TEST_CASE("canonize reports pipeline failures") {
  Workdir w;
  io::json j = io::parse_json(fixture_problem());
  j["spec"] = io::spec_to_json({{BlockSpec::pair({0, -2}, 1), BlockSpec::pair({0, -3}, 1)}});
  std::string out;
  CHECK(run({"canonize", w.write("p.json", j.dump()), "-o", w.path("n.json")}, &out) == 4);
  CHECK((out.find("EIGENVALUE_DRIFT") != std::string::npos || out.find("STRUCTURE_MISMATCH") != std::string::npos));
}

TEST_CASE("stability command") {
  Workdir w;
  const std::string spec = w.write("spec.json", io::spec_to_json(fixtures::spec()).dump());
  REQUIRE(run({"gen", spec, "-o", w.path("inst.json"), "--seed", "2"}) == 0);
  CHECK(run({"stability", w.path("inst.json"), "-o", w.path("s.csv"), "--deltas", "1e-2,1e-4", "--trials", "3"}) == 0);
  std::ifstream csv(w.path("s.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 7);
  CHECK(io::parse_json(slurp(w.path("s.json")))["boundedness_flag"] == true);

  CHECK(run({"stability", w.path("inst.json"), "-o", w.path("j.csv"), "--deltas", "1e-2,1e-4", "--trials", "3",
             "--jobs", "3"}) == 0);
  CHECK(slurp(w.path("s.csv")) == slurp(w.path("j.csv")));

  CHECK(run({"stability", w.path("inst.json"), "-o", w.path("w.csv"), "--deltas", "1e-3", "--trials", "2", "--mode",
             "weak"}) == 0);
  std::ifstream weak(w.path("w.csv"));
  std::getline(weak, line);
  CHECK(line.find("matched_eigenvalues") != std::string::npos);

  CHECK(run({"stability", w.path("inst.json"), "-o", w.path("z.csv"), "--trials", "0"}) == 2);
  CHECK(run({"stability", w.path("inst.json"), "-o", w.path("z.csv"), "--deltas", "1e-4,1e-2"}) == 2);
}

TEST_CASE("environment overrides") {
  Workdir w;
  const std::string prob = w.write("prob.json", fixture_problem());
  CMatrix nudged = fixtures::M();
  nudged(0, 0) += 1e-6;
  const std::string b = w.write("m.json", basis_file(nudged, "focs"));
  CHECK(run({"verify", prob, b}) == 1);
  setenv("INDEFCANON_TOL", "1e-3", 1);
  CHECK(run({"verify", prob, b}) == 0);
  unsetenv("INDEFCANON_TOL");
}
