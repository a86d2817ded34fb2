#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ins/norms.hpp"
#include "ins/random_field.hpp"
#include "ins/twisted.hpp"

using namespace ins;
using namespace ins::twisted;

namespace {
constexpr double kPi = std::numbers::pi;

Matrix2Field nilpotent_shear(Grid g, double amp) {
    Matrix2Field A = Matrix2Field::identity(g);
    ScalarField s = ScalarField::sample(
        g, [amp](double, double y) { return amp * std::sin(2 * kPi * y); });
    for (std::size_t i = 0; i < A.nodes(); ++i) A(0, 1)[i] = s[i];
    return A;
}

VectorField random_R(Grid g, std::uint64_t seed) {
    VectorField R(g);
    R[0] = random_spectral_field(g, 2.0, mix_seed(seed, 0));
    R[1] = random_spectral_field(g, 2.0, mix_seed(seed, 1));
    return R;
}

}  // namespace

TEST_CASE("untwisted case A = Id: one corrective iteration, exact divergence") {
    Grid g{64, 2};
    Matrix2Field A = Matrix2Field::identity(g);
    VectorField R = random_R(g, 3);
    TwistedProblem p = TwistedProblem::build({0.0}, {A}, {R}, 1e-12);
    CHECK(p.id_minus_A_inf == 0.0);
    TwistedSolution sol = solve_twisted(p, 50);
    CHECK(sol.all_converged);
    CHECK(sol.outcomes[0].iterations == 1);
    ScalarField g_rhs = divergence(R);
    ScalarField dw = divergence(sol.w[0]) - g_rhs;
    CHECK(lp_norm(dw, 2.0) < 1e-10 * lp_norm(g_rhs, 2.0));
    // w equals grad invlap div (R - mean R)
    VectorField wref = leray_project(R).gradient_part;
    VectorField d = sol.w[0];
    d -= wref;
    CHECK(lp_norm(d, 2.0) < 1e-12);
}

TEST_CASE("R = 0 gives w = 0 with no corrective iterations") {
    Grid g{32, 2};
    TwistedProblem p =
        TwistedProblem::build({0.0}, {nilpotent_shear(g, 0.3)}, {VectorField(g)}, 1e-12);
    TwistedSolution sol = solve_twisted(p, 50);
    CHECK(sol.all_converged);
    CHECK(sol.outcomes[0].iterations == 0);
    CHECK(lp_norm(sol.w[0], kInfinity) == 0.0);
}

TEST_CASE("nilpotent shear with small amplitude: geometric convergence, tight residual") {
    Grid g{64, 2};
    Matrix2Field A = nilpotent_shear(g, 0.1);
    VectorField R = random_R(g, 17);
    TwistedProblem p = TwistedProblem::build({0.0}, {A}, {R}, 1e-12);
    CHECK(p.id_minus_A_inf == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(p.max_det_deviation < 1e-14);
    TwistedSolution sol = solve_twisted(p, 200);
    CHECK(sol.all_converged);
    CHECK(sol.outcomes[0].iterations < 25);  // contraction ~0.1
    const double gnorm = lp_norm(divergence(R), 2.0);
    CHECK(sol.outcomes[0].residual < 1e-8);
    CHECK(sol.outcomes[0].residual <= 10.0 * 1e-12 * gnorm + 1e-13);
}

TEST_CASE("solution is linear in R for fixed A") {
    Grid g{64, 2};
    Matrix2Field A = nilpotent_shear(g, 0.2);
    VectorField R1 = random_R(g, 5);
    VectorField R2 = random_R(g, 6);
    VectorField R12 = R1;
    R12 += R2;
    TwistedProblem p = TwistedProblem::build({0.0, 1.0, 2.0}, {A, A, A}, {R1, R2, R12}, 1e-13);
    TwistedSolution sol = solve_twisted(p, 300);
    REQUIRE(sol.all_converged);
    VectorField sum = sol.w[0];
    sum += sol.w[1];
    sum -= sol.w[2];
    CHECK(lp_norm(sum, 2.0) < 1e-10);
}

TEST_CASE("contraction estimate: zero at A = Id, bounded by the multiplier norm") {
    Grid g{32, 2};
    std::vector<double> times{0.0, 0.05, 0.1, 0.15};
    {
        std::vector<Matrix2Field> A(times.size(), Matrix2Field::identity(g));
        std::vector<VectorField> R(times.size(), VectorField(g));
        TwistedProblem p = TwistedProblem::build(times, A, R, 1e-12);
        CHECK(contraction_estimate(p, 4) == doctest::Approx(0.0));
    }
    for (double q : {0.1, 0.3}) {
        std::vector<Matrix2Field> A(times.size(), nilpotent_shear(g, q));
        std::vector<VectorField> R(times.size(), VectorField(g));
        TwistedProblem p = TwistedProblem::build(times, A, R, 1e-12);
        const double est = contraction_estimate(p, 6);
        CHECK(est > 0.0);
        CHECK(est <= q * 1.6 + 0.05);  // multiplier bound plus interpolation slack
    }
}

TEST_CASE("adversarial det-1 matrix defeats the iteration and is classified") {
    // A = [[1+s^2, s],[s, 1]], det = 1, max entry s, operator norm of Id - A
    // exceeds 1 for s = 0.9
    Grid g{32, 2};
    const double s = 0.9;
    Matrix2Field A = Matrix2Field::identity(g);
    for (std::size_t i = 0; i < A.nodes(); ++i) {
        A(0, 0)[i] = 1.0 + s * s;
        A(0, 1)[i] = s;
        A(1, 0)[i] = s;
        A(1, 1)[i] = 1.0;
    }
    ScalarField det = A.det();
    for (std::size_t i = 0; i < det.size(); ++i) CHECK(det[i] == doctest::Approx(1.0));

    VectorField R = random_R(g, 29);
    TwistedProblem p = TwistedProblem::build({0.0}, {A}, {R}, 1e-12);
    CHECK(p.id_minus_A_inf > 1.0);  // smallness hypothesis genuinely violated

    CHECK_THROWS_AS((void)solve_twisted(p, 500), IterationDiverged);
    TwistedSolution sol = solve_twisted(p, 500, false);
    CHECK(!sol.all_converged);
    CHECK(sol.outcomes[0].diverged);
    CHECK(sol.outcomes[0].expansion > 1.0);
}

TEST_CASE("problem data: A_t norm from finite differences") {
    Grid g{32, 2};
    std::vector<double> times{0.0, 0.5, 1.0};
    std::vector<Matrix2Field> A;
    for (double t : times) A.push_back(nilpotent_shear(g, 0.1 * t));
    std::vector<VectorField> R(times.size(), VectorField(g));
    TwistedProblem p = TwistedProblem::build(times, A, R, 1e-12);
    // A_t = [[0, 0.1 sin(2 pi y)],[0,0]]: L6 norm of the pointwise op norm
    ScalarField mag = ScalarField::sample(
        g, [](double, double y) { return std::abs(0.1 * std::sin(2 * kPi * y)); });
    const double l6 = lp_norm(mag, 6.0);
    CHECK(p.At_l2l6 == doctest::Approx(l6).epsilon(1e-10));
}

TEST_CASE("problem built from a flow map; convergence log is valid JSON-ish") {
    Grid g{32, 2};
    VectorField shear(g);
    shear[0] = ScalarField::sample(
        g, [](double, double y) { return 0.05 * std::sin(2 * kPi * y); });
    lagr::VelocityTrajectory traj;
    for (int i = 0; i <= 4; ++i) traj.push(0.05 * i, shear);
    lagr::FlowMap fm = lagr::integrate_flow(traj, g);
    std::vector<VectorField> R(fm.samples.size(), random_R(g, 91));
    TwistedProblem p = TwistedProblem::from_flowmap(fm, R, 1e-11);
    CHECK(p.max_det_deviation < 1e-10);
    CHECK(p.id_minus_A_inf < 0.1);
    TwistedSolution sol = solve_twisted(p, 200);
    CHECK(sol.all_converged);
    const std::string log = convergence_log_json(p, sol);
    CHECK(log.find("\"all_converged\": true") != std::string::npos);
    CHECK(log.find("\"slices\"") != std::string::npos);
}
