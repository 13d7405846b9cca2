// python bindings for the symplectic normal form library
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spnf/blocks.hpp"
#include "spnf/synth.hpp"

namespace py = pybind11;
using namespace spnf;

PYBIND11_MODULE(_spnf, m) {
    m.doc() = "symplectic normal form and conjugacy toolkit";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NotSymplectic>(m, "NotSymplectic", PyExc_ValueError);
    py::register_exception<ToleranceAmbiguity>(m, "ToleranceAmbiguity", PyExc_RuntimeError);

    py::enum_<CaseTag>(m, "CaseTag")
        .value("RealOffCircle", CaseTag::RealOffCircle)
        .value("ComplexOffCircle", CaseTag::ComplexOffCircle)
        .value("PlusOne", CaseTag::PlusOne)
        .value("MinusOne", CaseTag::MinusOne)
        .value("UnitNonReal", CaseTag::UnitNonReal);

    py::class_<ToleranceConfig>(m, "ToleranceConfig")
        .def(py::init<>())
        .def_readwrite("rank_rel_tol", &ToleranceConfig::rank_rel_tol)
        .def_readwrite("eig_cluster_tol", &ToleranceConfig::eig_cluster_tol)
        .def_readwrite("circle_snap_tol", &ToleranceConfig::circle_snap_tol)
        .def_readwrite("residual_tol", &ToleranceConfig::residual_tol);

    py::class_<NormalFormBlock>(m, "NormalFormBlock")
        .def(py::init([](CaseTag tag, cplx lam, int size_param, int sign, int dim) {
                 return NormalFormBlock{tag, lam, size_param, sign, dim};
             }),
             py::arg("case_tag"), py::arg("lambda_"), py::arg("size_param"), py::arg("sign"),
             py::arg("dim"))
        .def_readonly("case_tag", &NormalFormBlock::case_tag)
        .def_readonly("lambda_", &NormalFormBlock::lambda)
        .def_readonly("size_param", &NormalFormBlock::size_param)
        .def_readonly("sign", &NormalFormBlock::sign)
        .def_readonly("dim", &NormalFormBlock::dim)
        .def("__repr__", [](const NormalFormBlock& b) {
            return std::string("NormalFormBlock(") + case_tag_name(b.case_tag) + ", lambda=(" +
                   std::to_string(b.lambda.real()) + "," + std::to_string(b.lambda.imag()) +
                   "), size_param=" + std::to_string(b.size_param) +
                   ", sign=" + std::to_string(b.sign) + ", dim=" + std::to_string(b.dim) + ")";
        });

    py::class_<Signature>(m, "Signature")
        .def_readonly("n_plus", &Signature::n_plus)
        .def_readonly("n_minus", &Signature::n_minus)
        .def_readonly("n_zero", &Signature::n_zero);

    py::class_<QhatEntry>(m, "QhatEntry")
        .def_readonly("m", &QhatEntry::m)
        .def_readonly("rank", &QhatEntry::rank)
        .def_readonly("signature", &QhatEntry::signature);

    py::class_<FingerprintClass>(m, "FingerprintClass")
        .def_readonly("case_tag", &FingerprintClass::case_tag)
        .def_readonly("representative", &FingerprintClass::representative)
        .def_readonly("dims", &FingerprintClass::dims)
        .def_readonly("q_hat", &FingerprintClass::q_hat);

    py::class_<Fingerprint>(m, "Fingerprint")
        .def_readonly("classes", &Fingerprint::classes);

    py::class_<ResidualReport>(m, "ResidualReport")
        .def_readonly("symplecticity_P", &ResidualReport::symplecticity_P)
        .def_readonly("reconstruction", &ResidualReport::reconstruction)
        .def_readonly("cond_P", &ResidualReport::cond_P);

    py::class_<NormalFormResult>(m, "NormalFormResult")
        .def_readonly("blocks", &NormalFormResult::blocks)
        .def_readonly("N", &NormalFormResult::N)
        .def_readonly("P", &NormalFormResult::P)
        .def_readonly("fingerprint", &NormalFormResult::fingerprint)
        .def_readonly("residual_report", &NormalFormResult::residual_report);

    py::class_<ConjugacyReport>(m, "ConjugacyReport")
        .def_readonly("equal", &ConjugacyReport::equal)
        .def_readonly("reason", &ConjugacyReport::reason);

    m.def("analyze", &analyze, py::arg("A"), py::arg("cfg") = ToleranceConfig{},
          "compute the symplectic normal form of A");
    m.def("fingerprint_of", &fingerprint_of, py::arg("A"), py::arg("cfg") = ToleranceConfig{},
          "compute the conjugacy fingerprint of A");
    m.def("conjugacy_equal", &conjugacy_equal, py::arg("A"), py::arg("B"),
          py::arg("cfg") = ToleranceConfig{}, "decide conjugacy of A and B in Sp(2n, R)");
    m.def(
        "fingerprints_equal",
        [](const Fingerprint& a, const Fingerprint& b, double lambda_tol) {
            std::string reason;
            bool eq = fingerprints_equal(a, b, lambda_tol, &reason);
            return py::make_tuple(eq, reason);
        },
        py::arg("a"), py::arg("b"), py::arg("lambda_tol") = 1e-9);
    m.def("build_block", &build_block, py::arg("block"),
          "matrix of a single canonical block");
    m.def("symplectic_direct_sum", &symplectic_direct_sum, py::arg("A"), py::arg("B"));
    m.def("random_symplectic", &random_symplectic, py::arg("n"), py::arg("seed"),
          py::arg("condition_cap") = 1e3, "seeded well-conditioned symplectic matrix");
    m.def(
        "build_from_params",
        [](const std::vector<NormalFormBlock>& blocks, std::uint64_t seed) {
            BlockSpec spec;
            spec.blocks = blocks;
            spec.conjugator_seed = seed;
            auto [A, fp] = build_from_params(spec);
            return py::make_tuple(A, fp);
        },
        py::arg("blocks"), py::arg("seed") = 0,
        "conjugated direct sum of blocks plus its expected fingerprint");
    m.def("omega0", &omega0, py::arg("dim"), "standard symplectic form matrix");
    m.def("symplecticity_residual", &symplecticity_residual, py::arg("A"));
}
