#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "indefcanon/error.hpp"
#include "indefcanon/io.hpp"

using namespace indefcanon;

TEST_CASE("matrix JSON round trip at full precision") {
  CMatrix m(2, 3);
  m << Complex(0.1, 1.0 / 3.0), Complex(-2.5e-300, 7), 1e17, Complex(0, -0.0), std::sqrt(2.0), Complex(1, 1);
  const io::json j = io::matrix_to_json(m);
  CHECK(j["rows"] == 2);
  CHECK(j["data"].size() == 6);
  CHECK(io::matrix_from_json(io::parse_json(j.dump())) == m);
}

TEST_CASE("bare real matrix data") {
  const io::json j = io::parse_json(R"({"rows": 2, "cols": 2, "data": [1, 2.5, [0, 1], -3]})");
  const CMatrix m = io::matrix_from_json(j);
  CHECK(m(0, 1) == Complex(2.5, 0));
  CHECK(m(1, 0) == Complex(0, 1));
  CHECK(io::matrix_to_json(to_complex(fixtures::R()), true)["data"][0].is_number());
}

TEST_CASE("malformed matrices and specs") {
  for (const char* text : {R"({"rows": 2, "cols": 2, "data": [1, 2, 3]})", R"({"rows": 1, "cols": 1})",
                           R"({"rows": 1, "cols": 1, "data": ["x"]})"}) {
    CHECK_THROWS_AS(io::matrix_from_json(io::parse_json(text)), CanonError);
  }
  CHECK_THROWS_AS(io::parse_json("{not json"), CanonError);
  CHECK_THROWS_AS(io::spec_from_json(io::parse_json(R"({"blocks": [{"kind": "odd", "size": 1}]})")), CanonError);
  CHECK_THROWS_AS(io::spec_from_json(io::parse_json(R"({"blocks": [{"kind": "pair", "lambda": 1, "size": 1}]})")),
                  CanonError);
}

TEST_CASE("spec JSON round trip") {
  const io::json j = io::parse_json(
      R"({"blocks": [{"kind": "real", "lambda": 2, "size": 3, "sign": -1}, {"kind": "PAIR", "lambda": [0, -2], "size": 2}]})");
  const JordanSpec s = io::spec_from_json(j);
  REQUIRE(s.blocks.size() == 2);
  CHECK(s.blocks[0].sign == -1);
  CHECK(s.blocks[1].lambda == Complex(0, -2));
  const JordanSpec back = io::spec_from_json(io::spec_to_json(s));
  CHECK(back.blocks[1].size == 2);
  CHECK(same_jordan_structure(back, s));
}

TEST_CASE("instance JSON round trip") {
  const Instance inst = gen_instance(random_spec(2, 3, 7), 2);
  const Instance back = io::instance_from_json(io::parse_json(io::instance_to_json(inst).dump()));
  CHECK(back.a0 == inst.a0);
  CHECK(back.h0 == inst.h0);
  CHECK(back.generator == inst.generator);
  CHECK(back.t0.matrix == inst.t0.matrix);
  CHECK(back.seed == inst.seed);
  CHECK(back.gamma == inst.gamma);
}

TEST_CASE("number formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("CSV layout") {
  const Instance inst = gen_instance(fixtures::spec(), 6);
  StabilityOptions opts;
  opts.mode = PerturbMode::Weak;
  const StabilityReport rep = estimate_lipschitz(inst, {1e-3}, 2, opts);
  std::ostringstream os;
  io::write_trials_csv(os, rep);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "delta,trial,input,output,ratio,z1_dev,z2_dev,z3_dev,z4_dev,status,match_ok,matched_eigenvalues");
  std::string row;
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == 11);
  }
  CHECK(rows == 2);
  CHECK(io::report_to_json(rep)["boundedness_flag"].is_boolean());
}
