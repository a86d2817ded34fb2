#include "ins/random_field.hpp"

#include <cmath>
#include <numbers>

namespace ins {

void SplitMix64::gaussian_pair(double& g1, double& g2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    g1 = r * std::cos(th);
    g2 = r * std::sin(th);
}

namespace {

inline std::complex<double> draw_coeff(SplitMix64& rng, double k2, double q) {
    double g1, g2;
    rng.gaussian_pair(g1, g2);
    const double a = std::pow(k2, -0.5 * q) / std::sqrt(2.0);
    return {a * g1, a * g2};
}

}  // namespace

ScalarField random_spectral_field(Grid g, double q, std::uint64_t seed) {
    g.validate();
    SplitMix64 rng(seed);
    Spectrum s(g);
    const int n = g.n;
    const int nh = n / 2;
    auto k2_of = [](const int* k, int d) {
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) k2 += static_cast<double>(k[a]) * k[a];
        return k2;
    };

    if (g.d == 2) {
        auto idx = [n](int ix, int iyc) {
            return static_cast<std::size_t>(ix) * (n / 2 + 1) + iyc;
        };
        // free modes: 0 < ky < n/2, any kx with |kx| < n/2
        for (int ix = 0; ix < n; ++ix) {
            const int kx = (ix <= nh) ? ix : ix - n;
            if (std::abs(kx) == nh) continue;
            for (int ky = 1; ky < nh; ++ky) {
                const int k[2] = {kx, ky};
                s[idx(ix, ky)] = draw_coeff(rng, k2_of(k, 2), q);
            }
        }
        // ky = 0 line: Hermitian pairs (kx, 0) <-> (-kx, 0)
        for (int kx = 1; kx < nh; ++kx) {
            const int k[2] = {kx, 0};
            const std::complex<double> c = draw_coeff(rng, k2_of(k, 2), q);
            s[idx(kx, 0)] = c;
            s[idx(n - kx, 0)] = std::conj(c);
        }
    } else {
        auto idx = [n](int ix, int iy, int izc) {
            return (static_cast<std::size_t>(ix) * n + iy) * (n / 2 + 1) + izc;
        };
        for (int ix = 0; ix < n; ++ix) {
            const int kx = (ix <= nh) ? ix : ix - n;
            if (std::abs(kx) == nh) continue;
            for (int iy = 0; iy < n; ++iy) {
                const int ky = (iy <= nh) ? iy : iy - n;
                if (std::abs(ky) == nh) continue;
                for (int kz = 1; kz < nh; ++kz) {
                    const int k[3] = {kx, ky, kz};
                    s[idx(ix, iy, kz)] = draw_coeff(rng, k2_of(k, 3), q);
                }
            }
        }
        // kz = 0 plane: canonical half is ky > 0, or ky == 0 and kx > 0
        for (int ix = 0; ix < n; ++ix) {
            const int kx = (ix <= nh) ? ix : ix - n;
            if (std::abs(kx) == nh) continue;
            for (int iy = 0; iy < n; ++iy) {
                const int ky = (iy <= nh) ? iy : iy - n;
                if (std::abs(ky) == nh) continue;
                const bool canonical = (ky > 0) || (ky == 0 && kx > 0);
                if (!canonical) continue;
                const int k[3] = {kx, ky, 0};
                const std::complex<double> c = draw_coeff(rng, k2_of(k, 3), q);
                const int mx = (n - ix) % n;
                const int my = (n - iy) % n;
                s[idx(ix, iy, 0)] = c;
                s[idx(mx, my, 0)] = std::conj(c);
            }
        }
    }
    return inverse(s);
}

VectorField random_divfree_velocity(Grid g, double q, std::uint64_t seed) {
    VectorField raw(g);
    for (int c = 0; c < g.d; ++c)
        raw[c] = random_spectral_field(g, q, mix_seed(seed, 1000 + c));
    return leray_project(raw).divergence_free;
}

}  // namespace ins
