#include "ins/scenario.hpp"

#include <cmath>
#include <numbers>

#include "ins/norms.hpp"
#include "ins/random_field.hpp"
#include "ins/spectral.hpp"

namespace ins::solver {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

VectorField taylor_green_velocity(Grid g, double amplitude) {
    VectorField v(g);
    v[0] = ScalarField::sample(g, [&](double x, double y) {
        return -amplitude * std::cos(kTwoPi * x) * std::sin(kTwoPi * y);
    });
    v[1] = ScalarField::sample(g, [&](double x, double y) {
        return amplitude * std::sin(kTwoPi * x) * std::cos(kTwoPi * y);
    });
    return v;
}

ScenarioFields make_taylor_green(Grid g, double amplitude) {
    return {ScalarField(g, 1.0), taylor_green_velocity(g, amplitude)};
}

ScenarioFields make_drop(Grid g, Vec2 center, double radius, double v0_amplitude) {
    return make_two_phase(g, 1.0, 0.0, center, radius, v0_amplitude);
}

ScenarioFields make_bubble(Grid g, Vec2 center, double radius, double v0_amplitude) {
    return make_two_phase(g, 0.0, 1.0, center, radius, v0_amplitude);
}

ScenarioFields make_two_phase(Grid g, double eta1, double eta2, Vec2 center, double radius,
                              double v0_amplitude) {
    if (eta1 < 0.0 || eta2 < 0.0) throw Error("two_phase: eta1, eta2 must be >= 0");
    const double r2 = radius * radius;
    const double h = g.h();
    // area-fraction grading of the cells cut by the interface (8x8 subcells);
    // interior and exterior nodes keep the exact eta values, so inf/sup of
    // rho0 are exactly {eta2, eta1} while the patch mass carries sub-cell
    // accuracy
    const int sub = 8;
    ScalarField rho = ScalarField::sample(g, [&](double x, double y) {
        const double corner = radius + 0.8 * h;
        const double d2 = torus_dist2(x, y, center.x, center.y);
        if (d2 < (radius - 0.8 * h) * (radius - 0.8 * h)) return eta1;
        if (d2 > corner * corner) return eta2;
        int inside = 0;
        for (int a = 0; a < sub; ++a)
            for (int b = 0; b < sub; ++b) {
                const double sx = x + ((a + 0.5) / sub - 0.5) * h;
                const double sy = y + ((b + 0.5) / sub - 0.5) * h;
                if (torus_dist2(sx, sy, center.x, center.y) < r2) ++inside;
            }
        const double frac = static_cast<double>(inside) / (sub * sub);
        return eta2 + (eta1 - eta2) * frac;
    });
    return {std::move(rho), taylor_green_velocity(g, v0_amplitude)};
}

ScenarioFields make_random(Grid g, std::uint64_t seed, double rho_star, double v0_amplitude) {
    ScalarField raw = random_spectral_field(g, 2.0, mix_seed(seed, 17));
    double amp = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) amp = std::max(amp, std::abs(raw[i]));
    ScalarField rho(g);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double x = 0.5 * rho_star * (1.0 + raw[i] / (amp > 0 ? amp : 1.0));
        rho[i] = std::min(std::max(x, 0.0), rho_star);
    }
    VectorField v = random_divfree_velocity(g, 2.0, mix_seed(seed, 23));
    const double vmax = lp_norm(v, kInfinity);
    if (vmax > 0) v *= v0_amplitude / vmax;
    return {std::move(rho), std::move(v)};
}

}  // namespace ins::solver
