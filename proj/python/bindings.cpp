// Python surface: the law catalog, the transform calculus, the max-convolution
// semigroups, the verification drivers, and the random-matrix samplers.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "freemax/errors.hpp"
#include "freemax/law.hpp"
#include "freemax/maxconv.hpp"
#include "freemax/measure_ops.hpp"
#include "freemax/phi.hpp"
#include "freemax/randmat.hpp"
#include "freemax/stransform.hpp"
#include "freemax/transforms.hpp"
#include "freemax/verify.hpp"

namespace py = pybind11;
using namespace freemax;

namespace {

StableKind parse_kind(const std::string& kind) {
    if (kind == "free") return StableKind::free;
    if (kind == "boolean") return StableKind::boolean_;
    throw std::invalid_argument("stable kind must be 'free' or 'boolean'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "transform calculus for max-convolution semigroups on [0, inf)";

    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
    py::register_exception<UnsupportedLawError>(m, "UnsupportedLawError",
                                                PyExc_ValueError);

    py::class_<Atom>(m, "Atom")
        .def_readonly("location", &Atom::location)
        .def_readonly("mass", &Atom::mass)
        .def("__repr__", [](const Atom& a) {
            return "Atom(location=" + std::to_string(a.location) +
                   ", mass=" + std::to_string(a.mass) + ")";
        });

    py::class_<Law>(m, "Law")
        .def_static("parse", &Law::parse, py::arg("text"),
                    "Parse a law spelling such as 'mp:2' or 'twopoint:0.5,2'.")
        .def_static("catalog", &Law::catalog)
        .def("cdf", &Law::cdf, py::arg("x"))
        .def("has_density", &Law::has_density)
        .def("density", &Law::density, py::arg("x"))
        .def("quantile", &Law::quantile, py::arg("p"))
        .def("atoms", &Law::atoms)
        .def("atom_at_zero", &Law::atom_at_zero)
        .def("support", &Law::support)
        .def("nonnegative_support", &Law::nonnegative_support)
        .def("name", &Law::name)
        .def("describe", &Law::describe)
        .def("__repr__", [](const Law& l) { return "<Law " + l.name() + ">"; });

    py::class_<Cdf>(m, "Cdf")
        .def("__call__", [](const Cdf& f, double x) { return f(x); }, py::arg("x"))
        .def("quantile", &Cdf::quantile, py::arg("p"))
        .def("support_lo", &Cdf::support_lo)
        .def("support_hi", &Cdf::support_hi)
        .def("label", &Cdf::label, py::return_value_policy::copy)
        .def_static("from_law", &Cdf::from_law, py::arg("law"))
        .def("__repr__",
             [](const Cdf& f) { return "<Cdf " + f.label() + ">"; });
    m.def("dilate", py::overload_cast<const Cdf&, double>(&dilate),
          py::arg("f"), py::arg("c"), "CDF of c*X when X ~ f, c > 0.");

    py::class_<GridMeasure>(m, "GridMeasure")
        .def("cdf", &GridMeasure::cdf, py::arg("x"))
        .def("quantile", &GridMeasure::quantile, py::arg("p"))
        .def("grid", &GridMeasure::grid)
        .def("cdf_values", &GridMeasure::cdf_values)
        .def("density_values", &GridMeasure::density_values)
        .def("atoms", &GridMeasure::atoms)
        .def("atom_at_zero", &GridMeasure::atom_at_zero)
        .def("continuous_mass", &GridMeasure::continuous_mass)
        .def("support", &GridMeasure::support)
        .def("mean", &GridMeasure::mean)
        .def("inv_moment", &GridMeasure::inv_moment)
        .def("dilated", &GridMeasure::dilated, py::arg("c"))
        .def("power", &GridMeasure::power, py::arg("s"));
    m.def("grid_from_law", &grid_from_law, py::arg("law"),
          py::arg("n_points") = 2048,
          "Piecewise-linear sampling of a catalog law.");

    py::class_<STransform>(m, "STransform")
        .def("__call__", [](const STransform& s, double z) { return s(z); },
             py::arg("z"))
        .def("inverse", &STransform::inverse, py::arg("s"))
        .def("domain_lo", &STransform::domain_lo)
        .def("atom_at_zero", &STransform::atom_at_zero)
        .def("a", &STransform::a)
        .def("b", &STransform::b)
        .def("constant", [](const STransform& s) { return s.constant(); })
        .def("closed_form", &STransform::closed_form)
        .def("label", &STransform::label, py::return_value_policy::copy);

    m.def("s_transform",
          [](const Law& l) { return s_transform(l); }, py::arg("law"));
    m.def("s_transform_grid",
          [](const GridMeasure& g) { return s_transform(g); }, py::arg("measure"),
          "Numeric S-transform of a gridded measure.");
    m.def("s_free_power", &s_free_power, py::arg("s"), py::arg("t"));
    m.def("s_boolean_power", &s_boolean_power, py::arg("s"), py::arg("t"));
    m.def("free_mult_power_s", &free_mult_power_s, py::arg("s"), py::arg("n"));
    m.def("dilation_s_rule", &dilation_s_rule, py::arg("s"), py::arg("c"));
    m.def("s_bt_composite", &s_bt_composite, py::arg("s"), py::arg("t"));
    m.def("stable_s_transform",
          [](double alpha, const std::string& kind) {
              return stable_s_transform(alpha, parse_kind(kind));
          },
          py::arg("alpha"), py::arg("kind"),
          "Closed S-transform of a positive stable law; kind is 'free' or 'boolean'.");

    m.def("free_add_power",
          [](const Law& l, double t, std::size_t n) { return free_add_power(l, t, n); },
          py::arg("law"), py::arg("t"), py::arg("n_points") = 2048);
    m.def("boolean_add_power",
          [](const Law& l, double t, std::size_t n) { return boolean_add_power(l, t, n); },
          py::arg("law"), py::arg("t"), py::arg("n_points") = 2048);
    m.def("b_t_operator",
          [](const Law& l, double t, std::size_t n) { return b_t_operator(l, t, n); },
          py::arg("law"), py::arg("t"), py::arg("n_points") = 2048);

    py::class_<PhiResult>(m, "PhiResult")
        .def_readonly("cdf", &PhiResult::cdf)
        .def_readonly("atom_at_zero", &PhiResult::atom_at_zero)
        .def_readonly("a", &PhiResult::a)
        .def_readonly("b", &PhiResult::b)
        .def_readonly("closed", &PhiResult::closed);
    m.def("phi", [](const Law& l) { return phi(l); }, py::arg("law"));
    m.def("phi", [](const STransform& s) { return phi(s); }, py::arg("s"));
    m.def("phi", [](const GridMeasure& g) { return phi(g); }, py::arg("measure"));
    m.def("chi_inverse_catalog", &chi_inverse_catalog, py::arg("law"));
    m.def("psi_op", &psi_op, py::arg("law"));

    m.def("classical_max_value", &classical_max_value, py::arg("v"), py::arg("t"));
    m.def("free_max_value", &free_max_value, py::arg("v"), py::arg("t"));
    m.def("boolean_max_value", &boolean_max_value, py::arg("v"), py::arg("t"));
    m.def("lambda_vee_value", &lambda_vee_value, py::arg("v"));
    m.def("pi_vee_value", &pi_vee_value, py::arg("v"));
    m.def("x_vee_value", &x_vee_value, py::arg("v"));
    m.def("x_vee_inv_value", &x_vee_inv_value, py::arg("v"));
    m.def("classical_max_pow", &classical_max_pow, py::arg("f"), py::arg("t"));
    m.def("free_max_pow", &free_max_pow, py::arg("f"), py::arg("t"));
    m.def("boolean_max_pow", &boolean_max_pow, py::arg("f"), py::arg("t"));
    m.def("lambda_vee", &lambda_vee, py::arg("f"));
    m.def("pi_vee", &pi_vee, py::arg("f"));
    m.def("x_vee", &x_vee, py::arg("f"));
    m.def("x_vee_inv", &x_vee_inv, py::arg("f"));
    m.def("b_t_vee", &b_t_vee, py::arg("f"), py::arg("t"));

    py::class_<VerificationReport>(m, "VerificationReport")
        .def_readonly("theorem_id", &VerificationReport::theorem_id)
        .def_readonly("param", &VerificationReport::param)
        .def_readonly("grid", &VerificationReport::grid)
        .def_readonly("lhs", &VerificationReport::lhs)
        .def_readonly("rhs", &VerificationReport::rhs)
        .def_readonly("sup_norm", &VerificationReport::sup_norm)
        .def_readonly("tolerance", &VerificationReport::tolerance)
        .def_readonly("passed", &VerificationReport::passed)
        .def_readonly("note", &VerificationReport::note)
        .def("__repr__", [](const VerificationReport& r) {
            return "<VerificationReport " + r.theorem_id + " " + r.param +
                   (r.passed ? " passed>" : " FAILED>");
        });
    m.def("verify_thm_free", &verify_thm_free, py::arg("mu"), py::arg("t"),
          py::arg("grid_n") = 512, py::arg("closed_tol") = 1e-8,
          py::arg("grid_tol") = 1e-3);
    m.def("verify_thm_boolean", &verify_thm_boolean, py::arg("mu"), py::arg("t"),
          py::arg("grid_n") = 512, py::arg("closed_tol") = 1e-8,
          py::arg("grid_tol") = 1e-3);
    m.def("verify_thm_bn",
          [](const Law& mu, double t, std::size_t n, double ct, double gt) {
              return verify_thm_bn(mu, t, n, ct, gt);
          },
          py::arg("mu"), py::arg("t"), py::arg("grid_n") = 512,
          py::arg("closed_tol") = 1e-8, py::arg("grid_tol") = 1e-3);
    m.def("verify_thm_bn_stable",
          [](const STransform& s, double t, std::size_t n, double ct) {
              return verify_thm_bn(s, t, n, ct);
          },
          py::arg("s"), py::arg("t"), py::arg("grid_n") = 512,
          py::arg("closed_tol") = 1e-8);
    m.def("verify_thm_classical", &verify_thm_classical, py::arg("lam"),
          py::arg("t"), py::arg("grid_n") = 512, py::arg("tol") = 1e-10);
    m.def("verify_mult_identity", &verify_mult_identity, py::arg("mu"),
          py::arg("n"), py::arg("grid_n") = 512, py::arg("tol") = 1e-3);
    m.def("verify_limit_props", &verify_limit_props, py::arg("f"),
          py::arg("n_list"), py::arg("grid_n") = 512, py::arg("tol") = 1e-2);

    py::class_<SpectrumSample>(m, "SpectrumSample")
        .def_readonly("ensemble", &SpectrumSample::ensemble)
        .def_readonly("dim", &SpectrumSample::dim)
        .def_readonly("n_factors", &SpectrumSample::n_factors)
        .def_readonly("seed", &SpectrumSample::seed)
        .def_readonly("eigenvalues", &SpectrumSample::eigenvalues);
    m.def("sample_wishart_spectrum", &sample_wishart_spectrum, py::arg("N"),
          py::arg("seed"));
    m.def("ginibre_product_spectrum", &ginibre_product_spectrum, py::arg("N"),
          py::arg("n"), py::arg("seed"));
    m.def("ks_distance",
          py::overload_cast<const SpectrumSample&, const Cdf&>(&ks_distance),
          py::arg("sample"), py::arg("target"));
    m.def("averaged_ginibre_ks", &averaged_ginibre_ks, py::arg("N"), py::arg("n"),
          py::arg("seed"), py::arg("reps"), py::arg("target"));
}
