// pybind11 bindings for the main operations: spectral field calculus, the
// variable-density solver, diagnostics, inequality checks, and the twisted
// divergence solve. Fields cross the boundary as numpy arrays (x-major).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ins/diagnostics.hpp"
#include "ins/inequalities.hpp"
#include "ins/lagrangian.hpp"
#include "ins/norms.hpp"
#include "ins/runner.hpp"
#include "ins/scenario.hpp"
#include "ins/snapshot.hpp"
#include "ins/twisted.hpp"

namespace py = pybind11;
using namespace ins;

namespace {

ScalarField scalar_from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1))
        throw Error("expected a square 2D array");
    Grid g{static_cast<int>(arr.shape(0)), 2};
    ScalarField f(g);
    std::copy(arr.data(), arr.data() + g.size(), f.data());
    return f;
}

py::array_t<double> scalar_to_numpy(const ScalarField& f) {
    const int n = f.grid().n;
    py::array_t<double> out({n, n});
    std::copy(f.data(), f.data() + f.size(), out.mutable_data());
    return out;
}

VectorField vector_from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 3 || arr.shape(0) != 2 || arr.shape(1) != arr.shape(2))
        throw Error("expected shape (2, n, n)");
    Grid g{static_cast<int>(arr.shape(1)), 2};
    VectorField v(g);
    for (int c = 0; c < 2; ++c)
        std::copy(arr.data() + c * g.size(), arr.data() + (c + 1) * g.size(), v[c].data());
    return v;
}

py::array_t<double> vector_to_numpy(const VectorField& v) {
    const int n = v.grid().n;
    py::array_t<double> out({2, n, n});
    for (int c = 0; c < 2; ++c)
        std::copy(v[c].data(), v[c].data() + v[c].size(), out.mutable_data() + c * v[c].size());
    return out;
}

py::dict record_to_dict(const diag::DiagnosticsRecord& r) {
    py::dict d;
    d["t"] = r.t;
    d["kinetic_energy"] = r.kinetic_energy;
    d["total_mass"] = r.total_mass;
    d["total_momentum"] = r.total_momentum;
    d["rho_min"] = r.rho_min;
    d["rho_max"] = r.rho_max;
    d["grad_v_l2"] = r.grad_v_l2;
    d["sqrho_vt_l2"] = r.sqrho_vt_l2;
    d["hess_v_l2"] = r.hess_v_l2;
    d["grad_P_l2"] = r.grad_P_l2;
    d["div_v_l2"] = r.div_v_l2;
    return d;
}

}  // namespace

PYBIND11_MODULE(pyins, m) {
    m.doc() = "variable-density incompressible Navier-Stokes on the unit torus";

    py::register_exception<Error>(m, "InsError");

    // --- fields ---
    m.def("grad", [](py::array_t<double> f) { return vector_to_numpy(grad(scalar_from_numpy(f))); });
    m.def("divergence",
          [](py::array_t<double> v) { return scalar_to_numpy(divergence(vector_from_numpy(v))); });
    m.def("curl2d",
          [](py::array_t<double> v) { return scalar_to_numpy(curl2d(vector_from_numpy(v))); });
    m.def("laplacian",
          [](py::array_t<double> f) { return scalar_to_numpy(laplacian(scalar_from_numpy(f))); });
    m.def("inv_laplacian", [](py::array_t<double> f) {
        return scalar_to_numpy(inv_laplacian(scalar_from_numpy(f)));
    });
    m.def("leray_project", [](py::array_t<double> v) {
        LerayParts p = leray_project(vector_from_numpy(v));
        return py::make_tuple(vector_to_numpy(p.divergence_free), vector_to_numpy(p.gradient_part));
    });
    m.def("lp_norm",
          [](py::array_t<double> f, double p) { return lp_norm(scalar_from_numpy(f), p); });
    m.def("lp_norm_vec",
          [](py::array_t<double> v, double p) { return lp_norm(vector_from_numpy(v), p); });
    m.def("hs_seminorm",
          [](py::array_t<double> f, double s) { return hs_seminorm(scalar_from_numpy(f), s); });
    m.def("fourier_truncate", [](py::array_t<double> f, int ncut) {
        TruncationParts p = fourier_truncate(scalar_from_numpy(f), ncut);
        return py::make_tuple(p.mean, scalar_to_numpy(p.low), scalar_to_numpy(p.high));
    });
    m.def("dealias_23", [](py::array_t<double> f) {
        return scalar_to_numpy(dealias_23(scalar_from_numpy(f)));
    });
    m.def("random_field", [](int n, double q, std::uint64_t seed) {
        return scalar_to_numpy(random_spectral_field(Grid{n, 2}, q, seed));
    });

    // --- solver ---
    py::class_<solver::SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("mu", &solver::SolverConfig::mu)
        .def_readwrite("dt", &solver::SolverConfig::dt)
        .def_readwrite("eps_floor", &solver::SolverConfig::eps_floor)
        .def_readwrite("rho_star", &solver::SolverConfig::rho_star)
        .def_readwrite("n", &solver::SolverConfig::n)
        .def_readwrite("inner_tol", &solver::SolverConfig::inner_tol)
        .def_readwrite("inner_maxit", &solver::SolverConfig::inner_maxit)
        .def_readwrite("T_end", &solver::SolverConfig::T_end);

    py::class_<solver::FluidState>(m, "FluidState")
        .def_readonly("t", &solver::FluidState::t)
        .def_property_readonly("rho",
                               [](const solver::FluidState& s) { return scalar_to_numpy(s.rho); })
        .def_property_readonly("v",
                               [](const solver::FluidState& s) { return vector_to_numpy(s.v); })
        .def_property_readonly("P",
                               [](const solver::FluidState& s) { return scalar_to_numpy(s.P); });

    m.def("taylor_green", [](int n, double amp) {
        auto sc = solver::make_taylor_green(Grid{n, 2}, amp);
        return py::make_tuple(scalar_to_numpy(sc.rho0), vector_to_numpy(sc.v0));
    }, py::arg("n"), py::arg("amplitude") = 1.0);
    m.def("drop", [](int n, double cx, double cy, double r, double amp) {
        auto sc = solver::make_drop(Grid{n, 2}, {cx, cy}, r, amp);
        return py::make_tuple(scalar_to_numpy(sc.rho0), vector_to_numpy(sc.v0));
    }, py::arg("n"), py::arg("cx") = 0.5, py::arg("cy") = 0.25, py::arg("radius") = 0.25,
       py::arg("amplitude") = 1.0);

    m.def("initial_state", [](py::array_t<double> rho, py::array_t<double> v) {
        return solver::initial_state(scalar_from_numpy(rho), vector_from_numpy(v));
    });
    m.def("step", [](const solver::FluidState& s, const solver::SolverConfig& cfg) {
        return solver::step(s, cfg);
    });
    m.def("advect_density", [](py::array_t<double> rho, py::array_t<double> v, double dt) {
        return scalar_to_numpy(
            solver::advect_density(scalar_from_numpy(rho), vector_from_numpy(v), dt));
    });

    // --- diagnostics ---
    m.def("conserved_report", [](const solver::FluidState& s, std::vector<double> p_list) {
        return record_to_dict(diag::conserved_report(s, p_list));
    }, py::arg("state"), py::arg("p_list") = std::vector<double>{1.0, 2.0});
    m.def("gronwall_log_bound",
          [](double X0, std::vector<double> t, std::vector<double> f) {
              auto b = diag::gronwall_log_bound(X0, t, f);
              return b.values;
          });
    m.def("riccati_bound_3d", [](double X0, std::vector<double> t, std::vector<double> f) {
        auto b = diag::riccati_bound_3d(X0, t, f);
        return py::make_tuple(b.values, b.blowup, b.blowup_time);
    });
    m.def("threed_formulas", [](double rho_star, double mu, double e0, double g0, double c) {
        auto r = diag::threed_formulas(rho_star, mu, e0, g0, c);
        return py::make_tuple(r.smallness_margin, r.local_time);
    });

    // --- inequalities ---
    m.def("weighted_poincare_check", [](py::array_t<double> a, py::array_t<double> z) {
        auto r = ineq::weighted_poincare_check(scalar_from_numpy(a), scalar_from_numpy(z));
        return py::make_tuple(r.lhs, r.rhs);
    });
    m.def("ladyzhenskaya_ratio", [](py::array_t<double> z) {
        return ineq::ladyzhenskaya_ratio(scalar_from_numpy(z));
    });
    m.def("desjardins_check", [](py::array_t<double> rho, py::array_t<double> z, double rho_star) {
        auto r = ineq::desjardins_check(scalar_from_numpy(rho), scalar_from_numpy(z), rho_star);
        return py::make_tuple(r.lhs, r.rhs_core, r.mean_term, r.ratio_proof_form);
    });
    m.def("truncation_bounds", [](py::array_t<double> z, int ncut) {
        auto r = ineq::truncation_bounds(scalar_from_numpy(z), ncut);
        return py::make_tuple(r.linf_low, r.sqrtlog_bound, r.tail_hhalf, r.tail_bound);
    });
    m.def("fractional_c_alpha", &ineq::fractional_c_alpha);

    // --- lagrangian / twisted ---
    m.def("deformation_inverse_shear", [](int n, double c, int terms) {
        Grid g{n, 2};
        Matrix2Field gx = Matrix2Field::identity(g);
        for (std::size_t i = 0; i < gx.nodes(); ++i) gx(0, 1)[i] = c;
        auto r = lagr::deformation_inverse(gx, terms);
        return r.series_error;
    });
    m.def("solve_twisted_slice",
          [](py::array_t<double> A11, py::array_t<double> A12, py::array_t<double> A21,
             py::array_t<double> A22, py::array_t<double> R, double tol, int maxit) {
              ScalarField a11 = scalar_from_numpy(A11);
              Grid g = a11.grid();
              Matrix2Field A(g);
              A(0, 0) = std::move(a11);
              A(0, 1) = scalar_from_numpy(A12);
              A(1, 0) = scalar_from_numpy(A21);
              A(1, 1) = scalar_from_numpy(A22);
              auto p = twisted::TwistedProblem::build({0.0}, {A}, {vector_from_numpy(R)}, tol);
              auto sol = twisted::solve_twisted(p, maxit);
              return py::make_tuple(vector_to_numpy(sol.w[0]), sol.outcomes[0].iterations,
                                    sol.outcomes[0].converged, sol.outcomes[0].residual);
          });

    m.attr("__version__") = "0.1.0";
}
