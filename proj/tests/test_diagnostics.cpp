#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ins/diagnostics.hpp"
#include "ins/norms.hpp"
#include "ins/random_field.hpp"
#include "ins/scenario.hpp"

using namespace ins;
using namespace ins::diag;
using solver::FluidState;

namespace {
constexpr double kPi = std::numbers::pi;

double rhs_log(double f, double X) { return f * X * std::log(std::numbers::e + X); }
double rhs_cubic(double f, double X) { return f * X * X * X; }
}  // namespace

TEST_CASE("conserved report: closed-form shear state") {
    Grid g{64, 2};
    FluidState s;
    s.rho = ScalarField(g, 1.0);
    s.v = VectorField(g);
    s.v[0] = ScalarField::sample(g, [](double, double y) { return std::sin(2 * kPi * y); });
    s.P = ScalarField(g);
    DiagnosticsRecord r = conserved_report(s, {1.0, 2.0});
    CHECK(r.kinetic_energy == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.total_mass == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(r.total_momentum[0]) < 1e-13);
    CHECK(std::abs(r.total_momentum[1]) < 1e-13);
    CHECK(r.rho_min == 1.0);
    CHECK(r.rho_max == 1.0);
}

TEST_CASE("conserved report: rest state has vanishing velocity norms") {
    Grid g{32, 2};
    FluidState s;
    s.rho = ScalarField::sample(g, [](double x, double) { return x < 0.3 ? 1.0 : 0.0; });
    s.v = VectorField(g);
    s.P = ScalarField(g);
    DiagnosticsRecord r = conserved_report(s, {2.0});
    CHECK(r.kinetic_energy == 0.0);
    CHECK(r.grad_v_l2 == 0.0);
    CHECK(r.hess_v_l2 == 0.0);
    CHECK(r.sqrho_vt_l2 == 0.0);
}

TEST_CASE("drop mass matches pi/16 to quadrature accuracy") {
    const double exact = kPi / 16.0;
    for (int n : {128, 512}) {
        Grid g{n, 2};
        auto sf = solver::make_drop(g, {0.5, 0.5}, 0.25, 0.0);
        const double m = integral(sf.rho0);
        // interface cells carry their area fraction, so the patch mass is far
        // below the O(h * perimeter) bound of a nodal indicator
        CHECK(std::abs(m - exact) / exact < 1e-4);
        CHECK(std::abs(m - exact) / exact < 0.1 * (kPi / 2.0) * g.h());
    }
}

TEST_CASE("energy residual vanishes identically at rest") {
    Grid g{32, 2};
    FluidState s;
    s.rho = ScalarField(g, 1.0);
    s.v = VectorField(g);
    s.P = ScalarField(g);
    Trajectory traj;
    for (int k = 0; k < 4; ++k) {
        s.t = 0.01 * k;
        traj.push_back(s);
    }
    for (double r : energy_residual(traj, 1.0)) CHECK(r == 0.0);
}

TEST_CASE("gronwall log bound: trivial and closed-form values") {
    BoundSeries b = gronwall_log_bound(2.0, {0.0, 0.5, 1.0}, {0.0, 0.0, 0.0});
    for (double v : b.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-13));

    BoundSeries c = gronwall_log_bound(1.0, {0.0, 1.0}, {1.0, 1.0});
    const double expected = std::pow(std::numbers::e + 1.0, std::numbers::e) - std::numbers::e;
    CHECK(c.values.back() == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS((void)gronwall_log_bound(1.0, {0.0, 1.0}, {0.0, -0.1}), Error);
}

TEST_CASE("gronwall log bound dominates the RK4 solution of X' = f X log(e+X)") {
    SplitMix64 rng(2026);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> t, f;
        const int ns = 21;
        for (int i = 0; i < ns; ++i) {
            t.push_back(i * 0.05);
            f.push_back(2.0 * rng.uniform());
        }
        const double X0 = 0.1 + 3.0 * rng.uniform();
        BoundSeries b = gronwall_log_bound(X0, t, f);
        std::vector<double> sol = rk4_ode(X0, t, f, 50, rhs_log);
        for (int i = 0; i < ns; ++i) CHECK(sol[i] <= b.values[i] * (1.0 + 1e-6) + 1e-6);
    }
}

TEST_CASE("riccati bound: trivial, closed-form blowup, RK4 domination") {
    BoundSeries b0 = riccati_bound_3d(2.0, {0.0, 1.0}, {0.0, 0.0});
    CHECK(b0.values.back() == doctest::Approx(2.0));
    CHECK(!b0.blowup);

    std::vector<double> t, f;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(i * 0.01);
        f.push_back(1.0);
    }
    BoundSeries b = riccati_bound_3d(1.0, t, f);
    CHECK(b.blowup);
    CHECK(b.blowup_time == doctest::Approx(0.5).epsilon(1e-10));

    SplitMix64 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> fr;
        for (std::size_t i = 0; i < t.size(); ++i) fr.push_back(rng.uniform());
        const double X0 = 0.2 + 0.8 * rng.uniform();
        BoundSeries br = riccati_bound_3d(X0, t, fr);
        std::vector<double> sol = rk4_ode(X0, t, fr, 50, rhs_cubic);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (br.blowup && t[i] >= br.blowup_time - 1e-2) break;
            CHECK(sol[i] <= br.values[i] * (1.0 + 1e-6) + 1e-6);
        }
    }
}

TEST_CASE("3D formulas: sentinel, unit plug-in, arithmetic re-evaluation") {
    ThreeDFormulas z = threed_formulas(1.0, 1.0, 0.0, 1.0, 1.0);
    CHECK(z.smallness_margin == doctest::Approx(1.0));
    CHECK(std::isinf(z.local_time));

    ThreeDFormulas u = threed_formulas(1.0, 1.0, 1.0, 1.0, 1.0);
    CHECK(u.smallness_margin == doctest::Approx(0.0));
    CHECK(u.local_time == doctest::Approx(1.0));

    SplitMix64 rng(99);
    for (int k = 0; k < 20; ++k) {
        const double rs = 0.5 + rng.uniform();
        const double mu = 0.1 + rng.uniform();
        const double e0 = rng.uniform();
        const double g0 = rng.uniform();
        const double c = 0.5 + rng.uniform();
        ThreeDFormulas r = threed_formulas(rs, mu, e0, g0, c);
        CHECK(r.smallness_margin ==
              doctest::Approx(c * mu * mu - std::pow(rs, 1.5) * e0 * g0).epsilon(1e-14));
        CHECK(r.local_time ==
              doctest::Approx(std::pow(mu / rs, 7.0) * c * rs / (e0 * e0 * std::pow(g0, 6.0)))
                  .epsilon(1e-14));
    }
}

TEST_CASE("apriori functionals: rest trajectory gives zero, one slice is valid") {
    Grid g{32, 2};
    FluidState s;
    s.rho = ScalarField(g, 1.0);
    s.v = VectorField(g);
    s.P = ScalarField(g);
    Trajectory traj;
    for (int k = 0; k < 3; ++k) {
        s.t = 0.01 * k;
        traj.push_back(s);
    }
    AprioriReport rep = apriori_functionals(traj, 1.0, {{4.0, 3.0}}, {1.0});
    for (double v : rep.h1_lhs) CHECK(v == 0.0);
    CHECK(rep.fitted_C0 == 0.0);
    CHECK(rep.sup_weighted_vt == 0.0);
    for (const auto& e : rep.shift_norms) {
        CHECK(e.sqrt_t_hess_v == 0.0);
        CHECK(e.sqrt_t_grad_P == 0.0);
    }

    Trajectory single{traj.front()};
    AprioriReport one = apriori_functionals(single, 1.0, {{4.0, 3.0}}, {1.0});
    CHECK(one.h1_lhs.size() == 1);
    CHECK(one.h1_lhs[0] == 0.0);
}

TEST_CASE("apriori functionals: Taylor-Green matches the closed form") {
    Grid g{64, 2};
    const double mu = 0.01, dt = 5e-4, T = 0.1;
    solver::SolverConfig cfg;
    cfg.n = 64;
    cfg.mu = mu;
    cfg.dt = dt;
    cfg.eps_floor = 0.0;
    auto sc = solver::make_taylor_green(g);
    FluidState s = solver::initial_state(sc.rho0, sc.v0);
    Trajectory traj{s};
    const int nsteps = static_cast<int>(std::llround(T / dt));
    for (int k = 0; k < nsteps; ++k) {
        s = solver::step(s, cfg);
        traj.push_back(s);
    }
    AprioriReport rep = apriori_functionals(traj, 1.0, {}, {});

    // exact trajectory: v = v0 e^{-l t}, l = 8 pi^2 mu
    const double l = 8 * kPi * kPi * mu;
    auto analytic = [&](double t) {
        // ||grad v||^2 = 4 pi^2 e^{-2lt}; ||v_t||^2 = l^2/2 e^{-2lt};
        // ||grad^2 v||^2 = (8 pi^2)^2/2 e^{-2lt}; ||grad P||^2 = pi^2 e^{-4lt}
        const double gv2 = 4 * kPi * kPi * std::exp(-2 * l * t);
        const double i2 = (1 - std::exp(-2 * l * t)) / (2 * l);
        const double i4 = (1 - std::exp(-4 * l * t)) / (4 * l);
        return gv2 +
               0.5 * ((l * l * 0.5 + std::pow(8 * kPi * kPi, 2) * 0.5) * i2 + kPi * kPi * i4);
    };
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        const double ex = analytic(rep.times[i]);
        CHECK(std::abs(rep.h1_lhs[i] - ex) / ex < 1e-3);
    }
    CHECK(rep.h1_lhs.back() <= rep.gronwall_rhs.back() * (1 + 1e-12));

    // the integral part of the LHS never decreases
    for (std::size_t i = 1; i < rep.times.size(); ++i) {
        const double gv2_i = grad_l2(traj[i].v);
        const double gv2_im = grad_l2(traj[i - 1].v);
        CHECK(rep.h1_lhs[i] - gv2_i * gv2_i >= rep.h1_lhs[i - 1] - gv2_im * gv2_im - 1e-14);
    }
}

TEST_CASE("fit_gronwall_c0: zero when the bound already holds at C0 = 0") {
    CHECK(fit_gronwall_c0({1.0, 0.5, 0.2}, 1.0, 3.0) == 0.0);
    const double c0 = fit_gronwall_c0({1.0, 4.0}, 1.0, 2.0);
    CHECK(c0 > 0.0);
    const double rhs = std::pow(std::numbers::e + 1.0, std::exp(c0 * 2.0)) - std::numbers::e;
    CHECK(rhs == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("apriori functionals: out-of-range (p, r) is computed with a warning") {
    Grid g{32, 2};
    FluidState s;
    s.rho = ScalarField(g, 1.0);
    s.v = VectorField(g);
    s.P = ScalarField(g);
    Trajectory traj;
    for (int k = 0; k < 3; ++k) {
        s.t = 0.01 * k;
        traj.push_back(s);
    }
    // p = 4 gives p* = 4; r = 6 is outside [2, p*)
    AprioriReport rep = apriori_functionals(traj, 1.0, {{4.0, 6.0}}, {});
    REQUIRE(rep.shift_norms.size() == 1);
    CHECK(!rep.shift_norms[0].in_lemma_range);
    CHECK(!rep.warnings.empty());
}

TEST_CASE("fitted log-Gronwall constant is stable under grid refinement") {
    double fitted[2] = {0, 0};
    int idx = 0;
    for (int n : {64, 128}) {
        Grid g{n, 2};
        solver::SolverConfig cfg;
        cfg.n = n;
        cfg.mu = 0.02;
        cfg.dt = 1e-3;
        cfg.eps_floor = 0.0;
        auto sc = solver::make_taylor_green(g);
        FluidState s = solver::initial_state(sc.rho0, sc.v0);
        Trajectory traj{s};
        for (int k = 0; k < 100; ++k) {
            s = solver::step(s, cfg);
            traj.push_back(s);
        }
        AprioriReport rep = apriori_functionals(traj, 1.0, {}, {});
        CHECK(rep.h1_lhs.back() <= rep.gronwall_rhs.back() * (1 + 1e-12));
        CHECK(std::isfinite(rep.h1_lhs.back()));
        fitted[idx++] = rep.fitted_C0;
    }
    CHECK(fitted[0] > 0.0);
    CHECK(std::abs(fitted[1] / fitted[0] - 1.0) <= 0.5);
}
