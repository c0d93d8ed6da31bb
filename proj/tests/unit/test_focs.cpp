#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "indefcanon/error.hpp"
#include "indefcanon/focs.hpp"
#include "indefcanon/harness.hpp"

using namespace indefcanon;

namespace {

const Complex kI{0.0, 1.0};

double distance_up_to_sign(const CMatrix& x, const CMatrix& y) {
  return std::min((x - y).cwiseAbs().maxCoeff(), (x + y).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("the fixture pair yields M up to sign") {
  const CMatrix a = to_complex(fixtures::A());
  const CMatrix h = to_complex(fixtures::H());
  const FocsResult r = focs_basis(a, h, fixtures::spec(), 1.0);
  CHECK(distance_up_to_sign(r.basis.matrix, fixtures::M()) < 1e-12);
  CHECK(r.basis.residuals.within(1e-10));
  CHECK(std::abs(r.basis.gamma - 1.0) < 1e-12);
  CHECK(r.basis.role == BasisRole::Focs);
}

TEST_CASE("trace Gram matrices follow the pipeline shapes") {
  const auto spec = fixtures::spec();
  const CMatrix h = to_complex(fixtures::H());
  const FocsResult r = focs_basis(to_complex(fixtures::A()), h, spec, 1.0);
  const PipelineTrace& t = r.trace;
  const PairGramShape shape = pair_gram_shape(t.gram, spec);
  const double scale = 1e-8 * spectral_norm(h) * std::pow(spectral_norm(t.z1), 2);
  CHECK(shape.x_block <= scale);
  CHECK(shape.u_block <= scale);
  CHECK(shape.zero_pattern <= scale);
  CHECK(shape.hankel <= scale);
  const Complex g1 = pair_gram_block(t.gram1, spec, 0)(1, 0);
  CHECK(std::abs(g1.imag()) <= 1e-8 * std::abs(g1));
  CHECK(g1.real() > 0);
  CHECK(std::abs(pair_gram_block(t.gram2, spec, 0)(1, 0) - 1.0) <= 1e-8);
  CHECK((t.z4.adjoint() * t.gram2 * t.z4 - build_P(spec)).norm() <= 1e-8);
  CHECK((t.z1 * t.z2 * t.z3 * t.z4 - t.n).norm() == 0.0);
}

TEST_CASE("every Z_k after the first commutes with J") {
  const JordanSpec spec = random_spec(77, 6, 10);
  const Instance inst = gen_instance(spec, 77);
  const FocsResult r = focs_basis(to_complex(inst.a0), to_complex(inst.h0), spec, 1.0);
  const CMatrix j = build_J(spec);
  for (const CMatrix* z : {&r.trace.z2, &r.trace.z3, &r.trace.z4}) {
    CHECK((*z * j - j * *z).norm() <= 1e-12 * std::max(1.0, z->norm()));
  }
}

TEST_CASE("Step 2 rotates the anchor onto the real axis") {
  const GramAnchor an = GramAnchor::from(std::polar(2.0, 0.6));
  const CMatrix z2 = step2_phase(an, 2);
  CHECK(z2.rows() == 4);
  const Complex rotated = std::conj(z2(2, 2)) * std::polar(2.0, 0.6) * z2(0, 0);
  CHECK(std::abs(rotated - Complex(an.s, 0.0)) < 1e-14);
  CHECK(GramAnchor::from(Complex(-1.0, -0.0)).phi == doctest::Approx(std::numbers::pi));
}

TEST_CASE("a purely imaginary anchor is refused") {
  try {
    step2_phase(GramAnchor::from(Complex(0.0, 3.0)), 1);
    FAIL("accepted an imaginary anchor");
  } catch (const CanonError& e) {
    CHECK(e.code() == ErrorCode::PureImaginaryAnchor);
  }
}

TEST_CASE("Step 3 scales the anchor to one") {
  const GramAnchor an = GramAnchor::from(Complex(4.0, 3.0));
  const CMatrix z3 = step3_scale(an, 1);
  CHECK(std::abs(z3(0, 0) * z3(1, 1) * an.s - 1.0) < 1e-14);
}

TEST_CASE("Step 4 turns a Hankel block into the anti-identity") {
  CMatrix g2(3, 3);
  g2 << 0, 0, 1,
        0, 1, Complex(0.2, 0.1),
        1, Complex(0.2, 0.1), Complex(-0.4, 0.3);
  const CMatrix z4 = step4_correct(g2);
  const CMatrix upper = z4.topLeftCorner(3, 3);
  CHECK(upper.isUpperTriangular());
  CHECK((upper.transpose() * g2 * upper - to_complex(anti_identity(3))).norm() < 1e-14);
  CHECK((z4.bottomRightCorner(3, 3) - upper.conjugate()).norm() == 0.0);
}

TEST_CASE("gamma-FOCS bases for several gamma") {
  const JordanSpec spec{{BlockSpec::pair({0.5, -1.5}, 2), BlockSpec::real(2.0, 2, -1), BlockSpec::pair({-1.0, 1.0}, 1)}};
  const Instance inst = gen_instance(spec, 4);
  for (Complex gamma : {Complex(1.0), kI, std::polar(1.0, 2.0), Complex(-2.0, 0.5)}) {
    const FocsResult r = focs_basis(to_complex(inst.a0), to_complex(inst.h0), spec, gamma);
    CHECK(r.basis.residuals.within(1e-9));
    CHECK(std::abs(check_cs(r.basis.matrix, spec, 1e-10) - gamma) < 1e-10);
  }
}

TEST_CASE("gamma = 0 is rejected") {
  CHECK_THROWS_AS(focs_basis(to_complex(fixtures::A()), to_complex(fixtures::H()), fixtures::spec(), 0.0),
                  CanonError);
}

TEST_CASE("sign alignment picks the closer sign per block") {
  const JordanSpec spec{{BlockSpec::real(1.0, 1), BlockSpec::pair({0, 1}, 1)}};
  CMatrix ref = CMatrix::Identity(3, 3);
  CMatrix n = ref;
  n.col(1) *= -1.0;
  n.col(2) *= -1.0;
  std::vector<int> chosen;
  CHECK(sign_align(n, ref, spec, &chosen) == ref);
  CHECK(chosen == std::vector<int>{1, -1});
}
