#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "indefcanon/error.hpp"
#include "indefcanon/focs.hpp"
#include "indefcanon/harness.hpp"
#include "indefcanon/rc.hpp"
#include "indefcanon/structure.hpp"

namespace py = pybind11;
using namespace indefcanon;

namespace {

JordanSpec make_spec(const std::vector<BlockSpec>& blocks) {
  JordanSpec spec{blocks};
  spec.validate();
  return spec;
}

py::dict basis_dict(const CanonicalBasis& b) {
  py::dict d;
  d["role"] = std::string(to_string(b.role));
  d["matrix"] = b.matrix;
  d["gamma"] = b.gamma;
  d["signs"] = b.signs;
  d["similarity"] = b.residuals.similarity;
  d["congruence"] = b.residuals.congruence;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Canonical bases for matrices selfadjoint in an indefinite inner product";

  static py::exception<CanonError> canon_error(m, "CanonError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const CanonError& e) {
      const py::tuple args = py::make_tuple(std::string(to_string(e.code())), e.detail());
      PyErr_SetObject(canon_error.ptr(), args.ptr());
    }
  });

  py::enum_<BlockKind>(m, "BlockKind").value("REAL", BlockKind::Real).value("PAIR", BlockKind::Pair);

  py::class_<BlockSpec>(m, "BlockSpec")
      .def_static("real", &BlockSpec::real, py::arg("lam"), py::arg("size"), py::arg("sign") = 1)
      .def_static("pair", &BlockSpec::pair, py::arg("lam"), py::arg("size"))
      .def_readonly("kind", &BlockSpec::kind)
      .def_readonly("lam", &BlockSpec::lambda)
      .def_readonly("size", &BlockSpec::size)
      .def_readonly("sign", &BlockSpec::sign)
      .def_property_readonly("dim", &BlockSpec::dim)
      .def("__repr__", [](const BlockSpec& b) {
        return "BlockSpec(" + std::string(b.is_pair() ? "PAIR" : "REAL") + ", " + py::repr(py::cast(b.lambda)).cast<std::string>() +
               ", size=" + std::to_string(b.size) + ")";
      });

  py::class_<JordanSpec>(m, "JordanSpec")
      .def(py::init(&make_spec), py::arg("blocks"))
      .def_readonly("blocks", &JordanSpec::blocks)
      .def_property_readonly("n", &JordanSpec::total_size)
      .def_property_readonly("has_pairs", &JordanSpec::has_pairs);

  m.def("build_J", &build_J);
  m.def("build_P", &build_P);
  m.def("build_JR", &build_JR);
  m.def("build_S", &build_S);
  m.def("toeplitz_inv_sqrt", &toeplitz_inv_sqrt, py::arg("g3"), py::arg("tol") = 1e-8);
  m.def("check_h_selfadjoint", &check_h_selfadjoint, py::arg("a"), py::arg("h"), py::arg("tol") = kDefaultTol);
  m.def("check_cs", &check_cs, py::arg("n"), py::arg("spec"), py::arg("tol") = kDefaultTol);

  m.def(
      "focs_basis",
      [](const CMatrix& a, const CMatrix& h, const JordanSpec& spec, Complex gamma) {
        return basis_dict(focs_basis(a, h, spec, gamma).basis);
      },
      py::arg("a"), py::arg("h"), py::arg("spec"), py::arg("gamma") = Complex(1.0, 0.0));
  m.def(
      "rc_basis", [](const CMatrix& a, const CMatrix& h, const JordanSpec& spec) { return basis_dict(rc_basis(a, h, spec).basis); },
      py::arg("a"), py::arg("h"), py::arg("spec"));
  m.def(
      "focs_from_rc", [](const CMatrix& r, const JordanSpec& spec) { return basis_dict(focs_from_rc(r, spec)); }, py::arg("r"),
      py::arg("spec"));

  m.def(
      "gen_instance",
      [](const JordanSpec& spec, std::uint64_t seed, const std::string& kind, Complex gamma) {
        GenOptions opts;
        if (kind == "rc") {
          opts.kind = BasisKind::Rc;
        } else if (kind != "focs") {
          throw py::value_error("kind must be 'focs' or 'rc'");
        }
        opts.gamma = gamma;
        const Instance inst = gen_instance(spec, seed, opts);
        py::dict d;
        d["A0"] = inst.a0;
        d["H0"] = inst.h0;
        d["W"] = inst.generator;
        d["T0"] = basis_dict(inst.t0);
        d["seed"] = inst.seed;
        return d;
      },
      py::arg("spec"), py::arg("seed"), py::arg("kind") = "focs", py::arg("gamma") = Complex(1.0, 0.0));
}
