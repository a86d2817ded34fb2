#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ins/lagrangian.hpp"
#include "ins/norms.hpp"
#include "ins/random_field.hpp"
#include "ins/scenario.hpp"
#include "ins/solver.hpp"

using namespace ins;
using namespace ins::lagr;

namespace {
constexpr double kPi = std::numbers::pi;

// steady shear v = (sin 2 pi y, 0): closed-form characteristics
VectorField shear_velocity(Grid g) {
    VectorField v(g);
    v[0] = ScalarField::sample(g, [](double, double y) { return std::sin(2 * kPi * y); });
    return v;
}

VelocityTrajectory steady_trajectory(const VectorField& v, double T, int slices) {
    VelocityTrajectory traj;
    for (int i = 0; i <= slices; ++i) traj.push(T * i / slices, v);
    return traj;
}

Matrix2Field nilpotent_shear(Grid g, double c) {
    Matrix2Field A = Matrix2Field::identity(g);
    for (std::size_t i = 0; i < A.nodes(); ++i) A(0, 1)[i] = c;
    return A;
}

}  // namespace

TEST_CASE("flow at rest: identity map, identity gradient") {
    Grid g{32, 2};
    VectorField v(g);
    FlowMap fm = integrate_flow(steady_trajectory(v, 0.1, 4), g);
    const FlowSample& s = fm.samples.back();
    CHECK(lp_norm(s.displacement, kInfinity) == 0.0);
    ScalarField det = s.gradX.det();
    for (std::size_t i = 0; i < det.size(); ++i) CHECK(det[i] == 1.0);
    CHECK(s.int_grad_u_inf == 0.0);
}

TEST_CASE("uniform translation: X = y + tU exactly") {
    Grid g{32, 2};
    VectorField v(g);
    for (std::size_t i = 0; i < v.nodes(); ++i) {
        v[0][i] = 0.3;
        v[1][i] = -0.7;
    }
    FlowMap fm = integrate_flow(steady_trajectory(v, 0.5, 10), g);
    const FlowSample& s = fm.samples.back();
    for (std::size_t i = 0; i < s.displacement.nodes(); ++i) {
        CHECK(s.displacement[0][i] == doctest::Approx(0.15).epsilon(1e-13));
        CHECK(s.displacement[1][i] == doctest::Approx(-0.35).epsilon(1e-13));
    }
    CHECK(std::abs(s.gradX(0, 1)[0]) < 1e-14);
}

TEST_CASE("steady shear: closed-form map and deformation gradient") {
    Grid g{64, 2};
    const double T = 0.5;
    FlowMap fm = integrate_flow(steady_trajectory(shear_velocity(g), T, 50), g);
    const FlowSample& s = fm.samples.back();
    const double h = g.h();
    double e_disp = 0.0, e_grad = 0.0, e_det = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const std::size_t id = static_cast<std::size_t>(i) * g.n + j;
            const double y = j * h;
            e_disp = std::max(e_disp,
                              std::abs(s.displacement[0][id] - T * std::sin(2 * kPi * y)));
            e_disp = std::max(e_disp, std::abs(s.displacement[1][id]));
            e_grad = std::max(e_grad,
                              std::abs(s.gradX(0, 1)[id] - 2 * kPi * T * std::cos(2 * kPi * y)));
            const double det = s.gradX(0, 0)[id] * s.gradX(1, 1)[id] -
                               s.gradX(0, 1)[id] * s.gradX(1, 0)[id];
            e_det = std::max(e_det, std::abs(det - 1.0));
        }
    CHECK(e_disp < 1e-10);
    CHECK(e_grad < 1e-8);
    CHECK(e_det < 1e-12);  // triangular gradient: det is exactly 1 up to round-off
    // the smallness indicator approximates int ||grad u||_inf = 2 pi T
    CHECK(s.int_grad_u_inf == doctest::Approx(2 * kPi * T).epsilon(0.05));
}

TEST_CASE("deformation inverse: identity, nilpotent shear exact at K = 1") {
    Grid g{32, 2};
    DeformationInverse r0 = deformation_inverse(Matrix2Field::identity(g), 0);
    CHECK(r0.series_error == 0.0);

    Matrix2Field gx = nilpotent_shear(g, 0.8);
    DeformationInverse r1 = deformation_inverse(gx, 1);
    CHECK(r1.series_error < 1e-12);
    CHECK(r1.A_direct(0, 1)[0] == doctest::Approx(-0.8));
    // K = 0 is off by exactly the shear entry
    DeformationInverse rK0 = deformation_inverse(gx, 0);
    CHECK(rK0.series_error == doctest::Approx(0.8));
}

TEST_CASE("deformation inverse: geometric series decay at contraction 0.4") {
    Grid g{32, 2};
    // smooth deformation with pointwise operator norm 0.4
    Matrix2Field gx = Matrix2Field::identity(g);
    ScalarField s1 = ScalarField::sample(g, [](double x, double y) {
        return std::sin(2 * kPi * x) * std::cos(2 * kPi * y);
    });
    ScalarField s2 = ScalarField::sample(g, [](double x, double y) {
        return std::cos(2 * kPi * x) * std::sin(2 * kPi * y);
    });
    double peak = 0.0;
    for (std::size_t i = 0; i < gx.nodes(); ++i)
        peak = std::max(peak, matrix2_op_norm(s1[i], s2[i], -s2[i], s1[i]));
    const double scale = 0.4 / peak;
    for (std::size_t i = 0; i < gx.nodes(); ++i) {
        gx(0, 0)[i] += scale * s1[i];
        gx(0, 1)[i] += scale * s2[i];
        gx(1, 0)[i] -= scale * s2[i];
        gx(1, 1)[i] += scale * s1[i];
    }
    double prev = deformation_inverse(gx, 2).series_error;
    for (int K : {4, 6, 8}) {
        const double cur = deformation_inverse(gx, K).series_error;
        const double ratio = cur / prev;  // two extra terms per refinement
        CHECK(ratio < 0.4 * 0.4 * 1.5);
        prev = cur;
    }
}

TEST_CASE("deformation inverse rejects singular maps") {
    Grid g{32, 2};
    Matrix2Field gx(g);  // all zeros
    CHECK_THROWS_AS((void)deformation_inverse(gx, 1), SingularMap);
}

TEST_CASE("lagrangian operators reduce to the Euclidean ones at A = Id") {
    Grid g{64, 2};
    Matrix2Field A = Matrix2Field::identity(g);
    ScalarField z = random_spectral_field(g, 2.0, 3);
    VectorField gz = grad(z);
    VectorField lg = lagrangian_grad(A, z);
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < gz.nodes(); ++i)
            CHECK(lg[c][i] == doctest::Approx(gz[c][i]).epsilon(1e-13));

    VectorField w(g);
    w[0] = random_spectral_field(g, 2.0, 4);
    w[1] = random_spectral_field(g, 2.0, 5);
    ScalarField d1 = twisted_divergence(A, w);
    ScalarField d2 = div_of_Az(A, w);
    ScalarField dref = divergence(w);
    ScalarField e1 = d1 - dref;
    ScalarField e2 = d2 - dref;
    CHECK(lp_norm(e1, 2.0) < 1e-12 * lp_norm(dref, 2.0));
    CHECK(lp_norm(e2, 2.0) < 1e-12 * lp_norm(dref, 2.0));
}

TEST_CASE("both twisted-divergence forms agree for det-1 maps") {
    Grid g{128, 2};
    Matrix2Field A = Matrix2Field::identity(g);
    ScalarField s = ScalarField::sample(g, [](double, double y) { return 0.5 * std::sin(2 * kPi * y); });
    for (std::size_t i = 0; i < A.nodes(); ++i) A(0, 1)[i] = s[i];
    VectorField z(g);
    z[0] = ScalarField::sample(g, [](double x, double) { return std::sin(2 * kPi * x); });
    z[1] = ScalarField::sample(g, [](double x, double y) { return std::cos(2 * kPi * (x + y)); });
    ScalarField diff = twisted_divergence(A, z) - div_of_Az(A, z);
    CHECK(lp_norm(diff, 2.0) < 1e-8);
}

TEST_CASE("twisted-divergence consistency shrinks under refinement, breaks for det != 1") {
    // composition of a horizontal and a vertical shear: an exact det-1
    // deformation gradient whose entries carry a full 2D spectrum
    auto make_A = [](Grid g) {
        Matrix2Field A(g);
        const double h = g.h();
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const double x = i * h, y = j * h;
                const double fp = 2 * kPi * 0.5 * std::cos(2 * kPi * y);
                const double gp = 2 * kPi * 0.4 * std::cos(2 * kPi * (x + 0.5 * std::sin(2 * kPi * y)));
                const std::size_t id = static_cast<std::size_t>(i) * g.n + j;
                A(0, 0)[id] = 1.0 + fp * gp;
                A(0, 1)[id] = -fp;
                A(1, 0)[id] = -gp;
                A(1, 1)[id] = 1.0;
            }
        return A;
    };
    auto make_z = [](Grid g) {
        VectorField z(g);
        z[0] = ScalarField::sample(g, [](double x, double y) {
            return std::sin(2 * kPi * 3 * x) * std::cos(2 * kPi * y);
        });
        z[1] = ScalarField::sample(g, [](double x, double y) {
            return std::cos(2 * kPi * (x + 2 * y));
        });
        return z;
    };
    double prev = kInfinity;
    for (int n : {16, 32, 64}) {
        Grid g{n, 2};
        ScalarField diff = twisted_divergence(make_A(g), make_z(g)) -
                           div_of_Az(make_A(g), make_z(g));
        const double err = lp_norm(diff, 2.0);
        CHECK(err < prev / 2.0);
        prev = err;
    }

    // negative control: det != 1 keeps the forms apart under refinement
    Grid g{64, 2};
    Matrix2Field bad = Matrix2Field::identity(g);
    ScalarField s = ScalarField::sample(g, [](double x, double) { return 0.3 * std::sin(2 * kPi * x); });
    for (std::size_t i = 0; i < bad.nodes(); ++i) bad(0, 0)[i] = 1.0 + s[i];
    ScalarField diff = twisted_divergence(bad, make_z(g)) - div_of_Az(bad, make_z(g));
    CHECK(lp_norm(diff, 2.0) > 1e-2);
}

TEST_CASE("pullback: identity and exact circular shift") {
    Grid g{32, 2};
    ScalarField f = random_spectral_field(g, 2.0, 8);
    VectorField zero(g);
    ScalarField same = pullback(f, zero);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == doctest::Approx(f[i]).epsilon(1e-14));

    VectorField shift(g);
    for (std::size_t i = 0; i < shift.nodes(); ++i) shift[0][i] = 3 * g.h();
    ScalarField moved = pullback(f, shift);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            CHECK(moved.at(i, j) == doctest::Approx(f.at((i + 3) % g.n, j)).epsilon(1e-13));
}

TEST_CASE("pullback of a transported density reproduces rho0 under refinement") {
    const double r2 = 0.2 * 0.2;
    double prev = kInfinity;
    for (int n : {64, 128}) {
        Grid g{n, 2};
        ScalarField rho0 = ScalarField::sample(g, [&](double x, double y) {
            return solver::torus_dist2(x, y, 0.5, 0.5) < r2 ? 1.0 : 0.0;
        });
        VectorField v = shear_velocity(g);
        const double dt = 1e-2 * 64.0 / n;
        const double T = 0.2;
        ScalarField rho = rho0;
        const int nsteps = static_cast<int>(std::llround(T / dt));
        for (int k = 0; k < nsteps; ++k) rho = solver::advect_density(rho, v, dt);
        VelocityTrajectory traj = steady_trajectory(v, T, nsteps);
        FlowMap fm = integrate_flow(traj, g);
        ScalarField eta = pullback(rho, fm.samples.back().displacement);
        eta -= rho0;
        const double err = lp_norm(eta, 1.0);
        CHECK(err < prev);
        CHECK(err < 0.05);
        prev = err;
    }
}

TEST_CASE("boundary curve: frozen circle, straight closed geodesic") {
    BoundaryCurve circ = BoundaryCurve::circle({0.5, 0.5}, 0.25, 128);
    const double s0 = circ.c1alpha_seminorm(0.5);
    CHECK(s0 > 0.0);

    Grid g{32, 2};
    VectorField zero(g);
    PatchSeries ps = patch_holder(steady_trajectory(zero, 0.1, 5), circ, 0.5);
    for (double s : ps.seminorms) CHECK(s == doctest::Approx(s0).epsilon(1e-12));

    // straight segment markers: constant tangent, zero seminorm
    BoundaryCurve line;
    line.closed = false;
    for (int i = 0; i < 64; ++i) line.points.push_back({0.1 + i / 128.0, 0.25});
    CHECK(line.c1alpha_seminorm(0.5) == doctest::Approx(0.0));
    CHECK(line.c1alpha_seminorm(0.3) == doctest::Approx(0.0));
}

TEST_CASE("circle under steady shear: seminorm matches a 4x-marker oracle") {
    Grid g{128, 2};
    VelocityTrajectory traj = steady_trajectory(shear_velocity(g), 0.5, 50);
    BoundaryCurve coarse = BoundaryCurve::circle({0.5, 0.5}, 0.25, 256);
    BoundaryCurve fine = BoundaryCurve::circle({0.5, 0.5}, 0.25, 1024);
    PatchSeries pc = patch_holder(traj, coarse, 0.5, 1, 50);
    PatchSeries pf = patch_holder(traj, fine, 0.5, 1, 50);
    const double a = pc.seminorms.back();
    const double b = pf.seminorms.back();
    CHECK(std::abs(a - b) / b < 0.1);
}

TEST_CASE("patch holder demands reseeding for wildly uneven markers") {
    BoundaryCurve bad;
    for (int i = 0; i < 32; ++i) {
        const double th = 2 * kPi * i / 32.0;
        bad.points.push_back({0.5 + 0.2 * std::cos(th), 0.5 + 0.2 * std::sin(th)});
    }
    bad.points[1] = bad.points[0] + Vec2{1e-4, 0.0};  // one tiny gap, one huge
    Grid g{32, 2};
    VectorField zero(g);
    VelocityTrajectory traj;
    traj.push(0.0, zero);
    traj.push(0.1, zero);
    CHECK_THROWS_AS((void)patch_holder(traj, bad, 0.5), ReseedRequired);
}

TEST_CASE("marker accuracy warning fires when the step-halving estimate is large") {
    Grid g{32, 2};
    FlowIntegrator::Options opt;
    opt.accuracy_check = true;
    opt.accuracy_tol = 1e-16;  // force the estimator over the threshold
    FlowIntegrator fi(opt);
    fi.add_markers({{0.3, 0.7}, {0.6, 0.2}});
    VectorField v = shear_velocity(g);
    std::vector<std::string> warnings;
    fi.advance(v, v, 0.0, 0.05, &warnings);
    CHECK(!warnings.empty());
}

TEST_CASE("flow samples carry A with A gradX = Id") {
    Grid g{32, 2};
    FlowMap fm = integrate_flow(steady_trajectory(shear_velocity(g), 0.3, 30), g);
    const FlowSample& s = fm.samples.back();
    double err = 0.0;
    for (std::size_t id = 0; id < s.gradX.nodes(); ++id) {
        const double p00 = s.A(0, 0)[id] * s.gradX(0, 0)[id] + s.A(0, 1)[id] * s.gradX(1, 0)[id];
        const double p01 = s.A(0, 0)[id] * s.gradX(0, 1)[id] + s.A(0, 1)[id] * s.gradX(1, 1)[id];
        const double p10 = s.A(1, 0)[id] * s.gradX(0, 0)[id] + s.A(1, 1)[id] * s.gradX(1, 0)[id];
        const double p11 = s.A(1, 0)[id] * s.gradX(0, 1)[id] + s.A(1, 1)[id] * s.gradX(1, 1)[id];
        err = std::max({err, std::abs(p00 - 1.0), std::abs(p01), std::abs(p10),
                        std::abs(p11 - 1.0)});
    }
    CHECK(err < 1e-12);
}
