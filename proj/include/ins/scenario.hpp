#pragma once

// Initial data families: constant-density Taylor-Green, a drop of fluid in
// vacuum (indicator density), a vacuum bubble, the two-phase eta1/eta2
// patch family, and seeded random data.

#include <cstdint>

#include "ins/field.hpp"
#include "ins/interp.hpp"

namespace ins::solver {

struct ScenarioFields {
    ScalarField rho0;
    VectorField v0;
};

// smallest periodic image distance squared on the unit torus
inline double torus_dist2(double x, double y, double cx, double cy) {
    double dx = std::abs(x - cx);
    double dy = std::abs(y - cy);
    dx = std::min(dx, 1.0 - dx);
    dy = std::min(dy, 1.0 - dy);
    return dx * dx + dy * dy;
}

ScenarioFields make_taylor_green(Grid g, double amplitude = 1.0);
ScenarioFields make_drop(Grid g, Vec2 center = {0.5, 0.25}, double radius = 0.25,
                         double v0_amplitude = 1.0);
ScenarioFields make_bubble(Grid g, Vec2 center = {0.5, 0.25}, double radius = 0.25,
                           double v0_amplitude = 1.0);
ScenarioFields make_two_phase(Grid g, double eta1, double eta2, Vec2 center = {0.5, 0.25},
                              double radius = 0.25, double v0_amplitude = 1.0);
ScenarioFields make_random(Grid g, std::uint64_t seed, double rho_star = 1.0,
                           double v0_amplitude = 1.0);

VectorField taylor_green_velocity(Grid g, double amplitude = 1.0);

}  // namespace ins::solver
