#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "indefcanon/error.hpp"
#include "indefcanon/harness.hpp"
#include "indefcanon/structure.hpp"

using namespace indefcanon;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const CanonError& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Parse;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_NOTHROW(fixtures::spec().validate());
  CHECK(code_of([] { JordanSpec{{BlockSpec::real(1.0, 0)}}.validate(); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { JordanSpec{{BlockSpec::real(1.0, 2, 0)}}.validate(); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { JordanSpec{{BlockSpec::pair({1.0, 0.0}, 1)}}.validate(); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { JordanSpec{{{BlockKind::Real, {1.0, 1.0}, 1, 1}}}.validate(); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("sizes and offsets") {
  const JordanSpec s{{BlockSpec::real(1.0, 3, -1), BlockSpec::pair({0.5, 2.0}, 2), BlockSpec::real(-2.0, 1)}};
  CHECK(s.total_size() == 8);
  CHECK(s.offsets() == std::vector<int>{0, 3, 7});
  CHECK(s.has_pairs());
}

TEST_CASE("canonical targets of the fixture spec") {
  const auto s = fixtures::spec();
  CMatrix j = CMatrix::Zero(4, 4);
  j(0, 0) = j(1, 1) = Complex(0, -2);
  j(2, 2) = j(3, 3) = Complex(0, 2);
  j(0, 1) = j(2, 3) = 1.0;
  CHECK(build_J(s) == j);
  CHECK(build_P(s) == to_complex(anti_identity(4)));
  CHECK(build_JR(s) == fixtures::JR());
}

TEST_CASE("sip sign follows the sign characteristic") {
  const JordanSpec s{{BlockSpec::real(2.0, 2, -1), BlockSpec::real(-1.0, 1, 1)}};
  CMatrix p = CMatrix::Zero(3, 3);
  p(0, 1) = p(1, 0) = -1.0;
  p(2, 2) = 1.0;
  CHECK(build_P(s) == p);
}

TEST_CASE("S for a single 1x1 pair") {
  const JordanSpec s{{BlockSpec::pair({1.0, -1.0}, 1)}};
  const double h = 1 / std::sqrt(2.0);
  CMatrix expected(2, 2);
  expected << h, Complex(0, -h), Complex(0, -h), h;
  CHECK((build_S(s) - expected).norm() < 1e-16);
  CHECK((build_S(s) * build_S_inv(s) - CMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("S identities on random specs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const JordanSpec s = random_spec(seed, 2, 12);
    const int n = s.total_size();
    const CMatrix S = build_S(s);
    CHECK((S.adjoint() * build_P(s) * S - build_P(s)).norm() < 1e-12);
    CHECK((build_S_inv(s) * build_J(s) * S - to_complex(build_JR(s))).norm() < 1e-12);
    CHECK((S * build_S_inv(s) - CMatrix::Identity(n, n)).norm() < 1e-12);
    CHECK(spectral_norm(S) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("H-selfadjointness") {
  const CMatrix a = to_complex(fixtures::A());
  const CMatrix h = to_complex(fixtures::H());
  CHECK(check_h_selfadjoint(a, h) == 0.0);
  CMatrix skew = h;
  skew(0, 1) += 0.1;
  CHECK(code_of([&] { check_h_selfadjoint(a, skew); }) == ErrorCode::NotHermitian);
  CMatrix sing = CMatrix::Zero(4, 4);
  sing(0, 0) = 1.0;
  CHECK(code_of([&] { check_h_selfadjoint(a, sing); }) == ErrorCode::SingularH);
  CMatrix bad = a;
  bad(0, 0) = 1.0;
  CHECK(check_h_selfadjoint(bad, h) > 1e-3);
}

TEST_CASE("conjugate symmetry of the fixture bases") {
  const auto s = fixtures::spec();
  CHECK(code_of([&] { check_cs(fixtures::T(), s); }) == ErrorCode::NotCs);
  CHECK(std::abs(check_cs(fixtures::L(), s) - 1.0) < 1e-14);
  CHECK(std::abs(check_cs(fixtures::M(), s) - 1.0) < 1e-14);
  CHECK(std::abs(check_cs(fixtures::M() * Complex(0, 1), s) - Complex(-1.0, 0.0)) < 1e-14);
}

TEST_CASE("conjugate symmetry survives the block phase gauge") {
  const auto s = fixtures::spec();
  for (double theta : {0.3, 1.1, -2.5}) {
    CMatrix g = CMatrix::Zero(4, 4);
    g.topLeftCorner(2, 2).diagonal().setConstant(std::polar(1.0, theta));
    g.bottomRightCorner(2, 2).diagonal().setConstant(std::polar(1.0, -theta));
    const CMatrix n = fixtures::M() * g;
    CHECK(std::abs(check_cs(n, s) - 1.0) < 1e-13);
    CHECK((g.inverse() * build_J(s) * g - build_J(s)).norm() < 1e-14);
    // The gauge rotates the pair-block Gram, so it is not a FOCS gauge.
    const CMatrix gram = n.adjoint() * to_complex(fixtures::H()) * n;
    CHECK(std::abs(gram(2, 1) - std::polar(1.0, 2 * theta)) < 1e-13);
  }
}

TEST_CASE("same Jordan structure ignores eigenvalues") {
  const JordanSpec a{{BlockSpec::real(1.0, 2, 1), BlockSpec::pair({0, 1}, 1)}};
  const JordanSpec b{{BlockSpec::pair({3, -2}, 1), BlockSpec::real(-4.0, 2, 1)}};
  const JordanSpec c{{BlockSpec::pair({3, -2}, 1), BlockSpec::real(-4.0, 2, -1)}};
  CHECK(same_jordan_structure(a, b));
  CHECK_FALSE(same_jordan_structure(a, c));
}
