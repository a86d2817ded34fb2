#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ins/norms.hpp"
#include "ins/random_field.hpp"
#include "ins/spectral.hpp"

using namespace ins;

namespace {
constexpr double kPi = std::numbers::pi;

ScalarField sine_x(Grid g, int k = 1) {
    return ScalarField::sample(g, [k](double x, double) { return std::sin(2 * kPi * k * x); });
}
}  // namespace

TEST_CASE("gradient of a constant vanishes") {
    Grid g{32, 2};
    ScalarField f(g, 3.75);
    VectorField gf = grad(f);
    CHECK(lp_norm(gf, kInfinity) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("single-mode gradient is exact at every node") {
    Grid g{64, 2};
    ScalarField f = sine_x(g);
    VectorField gf = grad(f);
    double err = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            err = std::max(err,
                           std::abs(gf[0].at(i, j) - 2 * kPi * std::cos(2 * kPi * i * g.h())));
    CHECK(err < 1e-12);
    CHECK(lp_norm(gf[1], kInfinity) < 1e-12);
}

TEST_CASE("inv_laplacian round trip on random zero-mean data") {
    Grid g{64, 2};
    ScalarField f = random_spectral_field(g, 1.5, 2024);
    ScalarField back = laplacian(inv_laplacian(f));
    back -= f;
    CHECK(lp_norm(back, 2.0) / lp_norm(f, 2.0) < 1e-10);
    CHECK(std::abs(mean(inv_laplacian(f))) < 1e-14);
}

TEST_CASE("inv_laplacian rejects nonzero mean") {
    Grid g{32, 2};
    ScalarField f(g, 1.0);
    CHECK_THROWS_AS((void)inv_laplacian(f), MeanViolation);
}

TEST_CASE("leray projection: divergence-free input is a fixed point") {
    Grid g{64, 2};
    VectorField v = random_divfree_velocity(g, 2.0, 11);
    LerayParts p = leray_project(v);
    VectorField d = p.divergence_free;
    d -= v;
    CHECK(lp_norm(d, 2.0) < 1e-12 * lp_norm(v, 2.0));
    CHECK(lp_norm(p.gradient_part, 2.0) < 1e-12 * lp_norm(v, 2.0));
}

TEST_CASE("leray projection kills pure gradients") {
    Grid g{64, 2};
    ScalarField phi = random_spectral_field(g, 2.0, 5);
    VectorField v = grad(phi);
    LerayParts p = leray_project(v);
    CHECK(lp_norm(p.divergence_free, 2.0) < 1e-12 * lp_norm(v, 2.0));
}

TEST_CASE("leray projection: random input, idempotence and orthogonality") {
    Grid g{64, 2};
    VectorField v(g);
    v[0] = random_spectral_field(g, 1.5, 101);
    v[1] = random_spectral_field(g, 1.5, 102);
    LerayParts p = leray_project(v);
    CHECK(div_l2(p.divergence_free) < 1e-12 * grad_l2(v));
    LerayParts p2 = leray_project(p.divergence_free);
    VectorField d = p2.divergence_free;
    d -= p.divergence_free;
    CHECK(lp_norm(d, 2.0) < 1e-12);
    const double v2 = lp_norm(v, 2.0);
    CHECK(std::abs(inner_l2(p.divergence_free, p.gradient_part)) < 1e-10 * v2 * v2);
}

TEST_CASE("lp norms: constants, closed-form sine integrals, domain errors") {
    Grid g{32, 2};
    ScalarField c(g, -2.5);
    for (double p : {1.0, 2.0, 4.0, kInfinity}) CHECK(lp_norm(c, p) == doctest::Approx(2.5));

    ScalarField f = sine_x(g);
    CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
    // int sin^4 = 3/8
    CHECK(lp_norm(f, 4.0) == doctest::Approx(std::pow(3.0 / 8.0, 0.25)).epsilon(1e-13));
    CHECK_THROWS_AS((void)lp_norm(f, 0.5), Error);
}

TEST_CASE("hs seminorm: constants, single mode, gradient-norm agreement") {
    Grid g{64, 2};
    ScalarField c(g, 4.0);
    CHECK(hs_seminorm(c, 0.5) == doctest::Approx(0.0));
    ScalarField f = sine_x(g);
    CHECK(hs_seminorm(f, 1.0) == doctest::Approx(2 * kPi / std::sqrt(2.0)).epsilon(1e-13));

    ScalarField r = random_spectral_field(g, 1.5, 77);
    const double a = hs_seminorm(r, 1.0);
    const double b = grad_l2(r);
    const double c2 = lp_norm(grad(r), 2.0);
    CHECK(std::abs(a - b) / a < 1e-12);
    CHECK(std::abs(a - c2) / a < 1e-12);
}

TEST_CASE("hs seminorm monotone in s on single-mode fields with |k| >= 1") {
    Grid g{32, 2};
    for (int k : {1, 3, 5}) {
        ScalarField f = sine_x(g, k);
        double prev = hs_seminorm(f, 0.25);
        for (double s : {0.5, 1.0, 1.5}) {
            const double cur = hs_seminorm(f, s);
            CHECK(cur >= prev * (1.0 - 1e-12));
            prev = cur;
        }
    }
}

TEST_CASE("fourier truncate: mode below and above the cutoff") {
    Grid g{64, 2};
    ScalarField f3 = sine_x(g, 3);
    TruncationParts p = fourier_truncate(f3, 5);
    ScalarField d = p.low;
    d -= f3;
    CHECK(lp_norm(d, kInfinity) < 1e-13);  // mean is 0 for the sine
    CHECK(lp_norm(p.high, kInfinity) < 1e-13);

    ScalarField f7 = sine_x(g, 7);
    TruncationParts q = fourier_truncate(f7, 5);
    CHECK(lp_norm(q.low, kInfinity) < 1e-13);
    ScalarField d2 = q.high;
    d2 -= f7;
    CHECK(lp_norm(d2, kInfinity) < 1e-13);
}

TEST_CASE("fourier truncate reconstructs and splits the H^1/2 energy") {
    Grid g{64, 2};
    ScalarField f = random_spectral_field(g, 1.5, 31);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += 0.7;  // nonzero mean
    TruncationParts p = fourier_truncate(f, 6);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        err = std::max(err, std::abs(p.mean + p.low[i] + p.high[i] - f[i]));
    CHECK(err < 1e-12);
    CHECK(std::abs(p.mean - 0.7) < 1e-12);

    const double lo = hs_seminorm(p.low, 0.5);
    const double hi = hs_seminorm(p.high, 0.5);
    const double tot = hs_seminorm(f, 0.5);
    CHECK(lo * lo + hi * hi == doctest::Approx(tot * tot).epsilon(1e-12));
}

TEST_CASE("Parseval: nodal L2 equals mean^2 plus spectral energy") {
    Grid g{64, 2};
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        ScalarField f = random_spectral_field(g, 1.5, seed);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += 0.3;
        const double l2 = lp_norm(f, 2.0);
        CHECK(std::abs(l2 * l2 - spectral_l2_sq(f)) / (l2 * l2) < 1e-10);
    }
}

TEST_CASE("2/3 dealiasing removes exactly the top third") {
    Grid g{32, 2};
    ScalarField lowmode = sine_x(g, 5);
    ScalarField d = dealias_23(lowmode);
    d -= lowmode;
    CHECK(lp_norm(d, kInfinity) < 1e-13);
    ScalarField highmode = sine_x(g, 12);  // 12 > 32/3
    CHECK(lp_norm(dealias_23(highmode), kInfinity) < 1e-13);
}

TEST_CASE("3D fields: gradient, laplacian round trip, leray") {
    Grid g{16, 3};
    ScalarField f = ScalarField::sample(
        g, [](double x, double y, double z) { return std::sin(2 * kPi * x) * std::cos(2 * kPi * y) + std::sin(2 * kPi * z); });
    VectorField gf = grad(f);
    CHECK(gf.dim() == 3);
    ScalarField r = random_spectral_field(g, 2.0, 9);
    ScalarField back = laplacian(inv_laplacian(r));
    back -= r;
    CHECK(lp_norm(back, 2.0) / lp_norm(r, 2.0) < 1e-10);
    VectorField v(g);
    for (int c = 0; c < 3; ++c) v[c] = random_spectral_field(g, 2.0, 20 + c);
    LerayParts p = leray_project(v);
    CHECK(div_l2(p.divergence_free) < 1e-11 * grad_l2(v));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(ScalarField(Grid{6, 2}), Error);
    CHECK_THROWS_AS(ScalarField(Grid{33, 2}), Error);
    CHECK_THROWS_AS(ScalarField(Grid{16, 4}), Error);
}

TEST_CASE("curl: 2D vorticity of a single mode and of a gradient") {
    Grid g{64, 2};
    VectorField v(g);
    v[1] = ScalarField::sample(g, [](double x, double) { return std::sin(2 * kPi * x); });
    ScalarField w = curl2d(v);  // dx v_y = 2 pi cos
    double err = 0.0;
    for (int i = 0; i < g.n; ++i)
        err = std::max(err, std::abs(w.at(i, 0) - 2 * kPi * std::cos(2 * kPi * i * g.h())));
    CHECK(err < 1e-12);

    ScalarField phi = random_spectral_field(g, 2.0, 55);
    CHECK(lp_norm(curl2d(grad(phi)), 2.0) < 1e-11 * grad_l2(phi));

    Grid g3{16, 3};
    VectorField u(g3);
    for (int c = 0; c < 3; ++c) u[c] = random_spectral_field(g3, 2.0, 60 + c);
    CHECK(lp_norm(divergence(curl3d(u)), 2.0) < 1e-10 * grad_l2(u));
}
