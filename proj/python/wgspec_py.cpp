#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wgspec/harness.hpp"

namespace py = pybind11;
using namespace wgspec;

namespace {

CurveModel make_curve(const std::string& kind, double a, double b, double x_lo, double x_hi) {
    if (kind == "line") return CurveModel::line(x_lo, x_hi);
    if (kind == "circle") return CurveModel::circle(a);
    if (kind == "helix") return CurveModel::helix(a, b, x_lo, x_hi);
    if (kind == "bump_curve") return CurveModel::bump_curve(a, x_lo, x_hi);
    throw ConfigError("unknown curve kind '" + kind + "'");
}

FiberSpec make_fiber(const std::string& kind, double radius, const std::string& mask, double h,
                     const std::string& scale, const std::string& twist) {
    FiberSpec f;
    if (kind == "disk") {
        f.kind = FiberKind::MassiveDisk;
        f.radius = radius;
    } else if (kind == "grid") {
        f.kind = FiberKind::MassiveGrid;
        f.mask = MaskSpec::named(mask, h);
        f.h = h;
    } else if (kind == "circle") {
        f.kind = FiberKind::HollowCircle;
    } else {
        throw ConfigError("unknown fiber kind '" + kind + "'");
    }
    if (!scale.empty()) f.scale = Expr::parse_x(scale);
    if (!twist.empty()) f.twist = Expr::parse_x(twist);
    return f;
}

VectorPotential make_potential(const std::string& kind, const std::vector<double>& B,
                               const std::string& chi) {
    if (kind == "uniform") return VectorPotential::uniform(Vec3(B.at(0), B.at(1), B.at(2)));
    if (kind == "pure_gauge") return VectorPotential::pure_gauge(Expr::parse_p(chi));
    if (kind == "zero") return VectorPotential::zero();
    throw ConfigError("unknown potential kind '" + kind + "'");
}

} // namespace

PYBIND11_MODULE(_wgspec, m) {
    m.doc() = "effective and full magnetic waveguide operators";

    py::register_exception<Error>(m, "WgspecError");

    py::class_<FrameField>(m, "FrameField")
        .def_readonly("grid", &FrameField::grid)
        .def_readonly("kappa1", &FrameField::kappa1)
        .def_readonly("kappa2", &FrameField::kappa2)
        .def_readonly("holonomy_angle", &FrameField::holonomy_angle)
        .def_readonly("closed", &FrameField::closed);

    py::class_<CurveModel>(m, "CurveModel");
    py::class_<FiberSpec>(m, "FiberSpec");
    py::class_<VectorPotential>(m, "VectorPotential");
    py::class_<FieldOnCurve>(m, "FieldOnCurve")
        .def_readonly("Bpar", &FieldOnCurve::Bpar)
        .def_readonly("Bperp1", &FieldOnCurve::Bperp1)
        .def_readonly("Bperp2", &FieldOnCurve::Bperp2)
        .def_readonly("AB", &FieldOnCurve::AB);

    py::class_<VerticalSpectrum>(m, "VerticalSpectrum")
        .def_readonly("eigenvalues", &VerticalSpectrum::eigenvalues)
        .def_readonly("gap", &VerticalSpectrum::gap)
        .def_readonly("mean_ysq", &VerticalSpectrum::mean_ysq)
        .def_readonly("Lnorm_sq", &VerticalSpectrum::Lnorm_sq)
        .def_readonly("mean_L", &VerticalSpectrum::mean_L)
        .def_property_readonly("mean_y", [](const VerticalSpectrum& v) {
            return std::vector<double>{v.mean_y.x(), v.mean_y.y()};
        })
        .def("lambda0", &VerticalSpectrum::lambda0);

    py::class_<EffectiveOperator1D>(m, "EffectiveOperator1D")
        .def_readonly("grid", &EffectiveOperator1D::grid)
        .def_readonly("potential", &EffectiveOperator1D::potential)
        .def_readonly("metric_weight", &EffectiveOperator1D::metric_weight)
        .def_readonly("link_phase", &EffectiveOperator1D::link_phase)
        .def_readonly("energy_offset", &EffectiveOperator1D::energy_offset)
        .def_readonly("total_flux", &EffectiveOperator1D::total_flux)
        .def("eigenvalues", &EffectiveOperator1D::eigenvalues, py::arg("k"),
             py::arg("solver_tol") = 1e-10);

    py::class_<FullOperatorAssembly>(m, "FullOperatorAssembly")
        .def_readonly("lambda_ref", &FullOperatorAssembly::lambda_ref)
        .def_readonly("n_x", &FullOperatorAssembly::n_x)
        .def_readonly("n_fiber", &FullOperatorAssembly::n_fiber)
        .def("eigenvalues_raw",
             [](const FullOperatorAssembly& f, int k, double tol) {
                 return f.eigenvalues_raw(k, tol);
             },
             py::arg("k"), py::arg("solver_tol") = 1e-9)
        .def("rescale", &FullOperatorAssembly::rescale);

    m.def("curve", &make_curve, py::arg("kind"), py::arg("a") = 1.0, py::arg("b") = 1.0,
          py::arg("x_lo") = -10.0, py::arg("x_hi") = 10.0);
    m.def("fiber", &make_fiber, py::arg("kind"), py::arg("radius") = 1.0,
          py::arg("mask") = "disk", py::arg("h") = 1.0 / 32, py::arg("scale") = "",
          py::arg("twist") = "");
    m.def("potential", &make_potential, py::arg("kind"),
          py::arg("B") = std::vector<double>{0, 0, 1}, py::arg("chi") = "0");

    m.def("build_parallel_frame",
          [](const CurveModel& c, int n, int refine) {
              return build_parallel_frame(c, n, std::nullopt, refine);
          },
          py::arg("curve"), py::arg("n_points"), py::arg("refine") = 8);
    m.def("curvature_norm_sq", &curvature_norm_sq);
    m.def("field_on_curve", &field_on_curve);

    m.def("solve_vertical_disk", &solve_vertical_disk, py::arg("rho"));
    m.def("solve_vertical_circle", &solve_vertical_circle);
    m.def("solve_vertical_grid",
          [](const std::string& mask, double h, int n_modes) {
              return solve_vertical_grid(MaskSpec::named(mask, h), h, n_modes);
          },
          py::arg("mask"), py::arg("h"), py::arg("n_modes") = 6);
    m.def("lambda02",
          [](const VerticalSpectrum& vs, double Bpar, double ell) {
              return lambda02(vs, Bpar, ell);
          },
          py::arg("vs"), py::arg("Bpar"), py::arg("ell") = 1.0);
    m.def("lambda02_bruteforce_fit",
          [](const std::string& mask, double h, double Bpar) {
              return lambda02_bruteforce_fit(MaskSpec::named(mask, h), h, Bpar);
          },
          py::arg("mask"), py::arg("h"), py::arg("Bpar"));
    m.def("bessel_j0_zero1", &bessel_j0_zero1);

    m.def("assemble_effective",
          [](const std::string& variant, const FrameField& frame, const FiberSpec& fiber,
             const VerticalSpectrum& vs, const FieldOnCurve& foc, double eps) {
              return assemble_effective(variant_from_string(variant), frame, fiber, vs, foc,
                                        eps);
          },
          py::arg("variant"), py::arg("frame"), py::arg("fiber"), py::arg("vs"), py::arg("foc"),
          py::arg("eps"));

    m.def("assemble_hollow_surface", &assemble_hollow_surface, py::arg("frame"),
          py::arg("fiber"), py::arg("A"), py::arg("sigma"), py::arg("eps"), py::arg("n_y"),
          py::arg("unknown_cap") = 500000);
    m.def("assemble_massive_tube", &assemble_massive_tube, py::arg("frame"), py::arg("fiber"),
          py::arg("vs"), py::arg("A"), py::arg("sigma"), py::arg("eps"),
          py::arg("unknown_cap") = 500000);

    m.def("spectral_distance",
          [](const std::vector<double>& a, const std::vector<double>& b, double lo, double hi) {
              const SpectralDistance d = spectral_distance(a, b, lo, hi);
              return py::make_tuple(d.hausdorff, d.max_pairwise);
          });
    m.def("convergence_fit", [](const std::vector<std::pair<double, double>>& pairs) {
        const ConvergenceFit f = convergence_fit(pairs);
        return py::make_tuple(f.slope, f.intercept, f.residual);
    });

    m.def("run_config_file", [](const std::string& path) {
        RunRecord rec = run_experiment(load_config(path));
        py::dict out;
        out["config_hash"] = rec.config_hash;
        py::dict fits;
        for (const auto& [v, f] : rec.fits) fits[py::str(v)] = f.slope;
        out["slopes"] = fits;
        return out;
    });
}
