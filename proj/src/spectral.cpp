#include "ins/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace ins {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// Plans are cached per (n, d) and executed on caller buffers via the
// new-array interface. Planner access is serialized; FFTW_ESTIMATE keeps
// plan selection deterministic.
PlanPair plans_for(const Grid& g) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.n, g.d);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int n = g.n;
    std::size_t nreal = g.size();
    std::size_t ncplx = (g.d == 2) ? static_cast<std::size_t>(n) * (n / 2 + 1)
                                   : static_cast<std::size_t>(n) * n * (n / 2 + 1);
    double* rbuf = fftw_alloc_real(nreal);
    fftw_complex* cbuf = fftw_alloc_complex(ncplx);
    PlanPair p;
    if (g.d == 2) {
        p.r2c = fftw_plan_dft_r2c_2d(n, n, rbuf, cbuf, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_2d(n, n, cbuf, rbuf, FFTW_ESTIMATE);
    } else {
        p.r2c = fftw_plan_dft_r2c_3d(n, n, n, rbuf, cbuf, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_3d(n, n, n, cbuf, rbuf, FFTW_ESTIMATE);
    }
    fftw_free(rbuf);
    fftw_free(cbuf);
    cache[key] = p;
    return p;
}

// Per-thread scratch, grown on demand and reused across calls; FFT buffers
// come from fftw_malloc so new-array execution keeps the plan's alignment.
struct Scratch {
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
    std::size_t rcap = 0, ccap = 0;
    ~Scratch() {
        fftw_free(rbuf);
        fftw_free(cbuf);
    }
    void ensure(std::size_t nreal, std::size_t ncplx) {
        if (rcap < nreal) {
            fftw_free(rbuf);
            rbuf = fftw_alloc_real(nreal);
            rcap = nreal;
        }
        if (ccap < ncplx) {
            fftw_free(cbuf);
            cbuf = fftw_alloc_complex(ncplx);
            ccap = ncplx;
        }
    }
};

Scratch& scratch() {
    static thread_local Scratch s;
    return s;
}

inline int signed_k(int i, int n) { return (i <= n / 2) ? i : i - n; }

}  // namespace

void forward_into(const ScalarField& f, Spectrum& out) {
    const Grid& g = f.grid();
    PlanPair p = plans_for(g);
    Scratch& sc = scratch();
    sc.ensure(g.size(), out.size());
    std::memcpy(sc.rbuf, f.data(), g.size() * sizeof(double));
    fftw_execute_dft_r2c(p.r2c, sc.rbuf, sc.cbuf);
    const double scale = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::complex<double>(sc.cbuf[i][0], sc.cbuf[i][1]) * scale;
}

void inverse_into(const Spectrum& s, ScalarField& out) {
    const Grid& g = s.grid();
    PlanPair p = plans_for(g);
    Scratch& sc = scratch();
    sc.ensure(g.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        sc.cbuf[i][0] = s[i].real();
        sc.cbuf[i][1] = s[i].imag();
    }
    fftw_execute_dft_c2r(p.c2r, sc.cbuf, sc.rbuf);
    std::memcpy(out.data(), sc.rbuf, g.size() * sizeof(double));
}

Spectrum forward(const ScalarField& f) {
    Spectrum out(f.grid());
    forward_into(f, out);
    return out;
}

ScalarField inverse(const Spectrum& s) {
    ScalarField out(s.grid());
    inverse_into(s, out);
    return out;
}

void for_each_mode(const Grid& g,
                   const std::function<void(std::size_t, const int*, double)>& fn) {
    const int n = g.n;
    const int nh = n / 2;
    int k[3] = {0, 0, 0};
    if (g.d == 2) {
        std::size_t idx = 0;
        for (int ix = 0; ix < n; ++ix) {
            k[0] = signed_k(ix, n);
            for (int iy = 0; iy <= nh; ++iy, ++idx) {
                k[1] = iy;
                const double w = (iy == 0 || iy == nh) ? 1.0 : 2.0;
                fn(idx, k, w);
            }
        }
    } else {
        std::size_t idx = 0;
        for (int ix = 0; ix < n; ++ix) {
            k[0] = signed_k(ix, n);
            for (int iy = 0; iy < n; ++iy) {
                k[1] = signed_k(iy, n);
                for (int iz = 0; iz <= nh; ++iz, ++idx) {
                    k[2] = iz;
                    const double w = (iz == 0 || iz == nh) ? 1.0 : 2.0;
                    fn(idx, k, w);
                }
            }
        }
    }
}

namespace {

// derivative symbol: i 2 pi k_a, zero on the Nyquist plane of dimension a
inline std::complex<double> deriv_symbol(int ka, int n) {
    if (std::abs(ka) == n / 2) return {0.0, 0.0};
    return {0.0, kTwoPi * ka};
}

Spectrum derivative_spectrum(const Spectrum& s, int axis) {
    const Grid& g = s.grid();
    Spectrum out(g);
    const int n = g.n;
    for_each_mode(g, [&](std::size_t i, const int* k, double) {
        out[i] = s[i] * deriv_symbol(k[axis], n);
    });
    return out;
}

}  // namespace

VectorField grad(const ScalarField& f) {
    const Grid& g = f.grid();
    Spectrum s = forward(f);
    VectorField out(g);
    for (int a = 0; a < g.d; ++a) out[a] = inverse(derivative_spectrum(s, a));
    return out;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid();
    Spectrum acc(g);
    for (int a = 0; a < v.dim(); ++a) {
        Spectrum s = forward(v[a]);
        const int n = g.n;
        for_each_mode(g, [&](std::size_t i, const int* k, double) {
            acc[i] += s[i] * deriv_symbol(k[a], n);
        });
    }
    return inverse(acc);
}

ScalarField curl2d(const VectorField& v) {
    if (v.dim() != 2) throw Error("curl2d: 2D field required");
    Spectrum sx = forward(v[0]);
    Spectrum sy = forward(v[1]);
    const Grid& g = v.grid();
    Spectrum out(g);
    const int n = g.n;
    for_each_mode(g, [&](std::size_t i, const int* k, double) {
        out[i] = sy[i] * deriv_symbol(k[0], n) - sx[i] * deriv_symbol(k[1], n);
    });
    return inverse(out);
}

VectorField curl3d(const VectorField& v) {
    if (v.dim() != 3) throw Error("curl3d: 3D field required");
    const Grid& g = v.grid();
    Spectrum s[3] = {forward(v[0]), forward(v[1]), forward(v[2])};
    VectorField out(g);
    const int n = g.n;
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        Spectrum comp(g);
        for_each_mode(g, [&](std::size_t i, const int* k, double) {
            comp[i] = s[c][i] * deriv_symbol(k[b], n) - s[b][i] * deriv_symbol(k[c], n);
        });
        out[a] = inverse(comp);
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    Spectrum s = forward(f);
    for_each_mode(g, [&](std::size_t i, const int* k, double) {
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) k2 += static_cast<double>(k[a]) * k[a];
        s[i] *= -kTwoPi * kTwoPi * k2;
    });
    return inverse(s);
}

VectorField laplacian(const VectorField& v) {
    VectorField out(v.grid());
    for (int a = 0; a < v.dim(); ++a) out[a] = laplacian(v[a]);
    return out;
}

ScalarField inv_laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    Spectrum s = forward(f);
    double l2 = std::sqrt(spectral_l2_sq(f));
    if (std::abs(s[0].real()) > 1e-10 * std::max(l2, 1e-300))
        throw MeanViolation("inv_laplacian: input has nonzero mean");
    for_each_mode(g, [&](std::size_t i, const int* k, double) {
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) k2 += static_cast<double>(k[a]) * k[a];
        if (k2 == 0.0)
            s[i] = 0.0;
        else
            s[i] /= -kTwoPi * kTwoPi * k2;
    });
    return inverse(s);
}

VectorField inv_laplacian(const VectorField& v) {
    VectorField out(v.grid());
    for (int a = 0; a < v.dim(); ++a) out[a] = inv_laplacian(v[a]);
    return out;
}

LerayParts leray_project(const VectorField& v) {
    // The projector uses the same Nyquist-zeroed wavenumbers as the first
    // derivatives, so div(v_df) vanishes exactly under the fixed convention.
    const Grid& g = v.grid();
    const int d = v.dim();
    const int nh = g.n / 2;
    std::vector<Spectrum> s;
    s.reserve(d);
    for (int a = 0; a < d; ++a) s.push_back(forward(v[a]));
    for_each_mode(g, [&](std::size_t i, const int* k, double) {
        double kp[3] = {0.0, 0.0, 0.0};
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) {
            kp[a] = (std::abs(k[a]) == nh) ? 0.0 : static_cast<double>(k[a]);
            k2 += kp[a] * kp[a];
        }
        if (k2 == 0.0) return;  // constants (and pure-Nyquist modes) pass through
        std::complex<double> kdotv(0.0, 0.0);
        for (int a = 0; a < d; ++a) kdotv += kp[a] * s[a][i];
        kdotv /= k2;
        for (int a = 0; a < d; ++a) s[a][i] -= kp[a] * kdotv;
    });
    LerayParts out{VectorField(g), VectorField(g)};
    for (int a = 0; a < d; ++a) {
        out.divergence_free[a] = inverse(s[a]);
        out.gradient_part[a] = v[a] - out.divergence_free[a];
    }
    return out;
}

void dealias_23(Spectrum& s) {
    const Grid& g = s.grid();
    const int kmax = g.n / 3;
    for_each_mode(g, [&](std::size_t i, const int* k, double) {
        for (int a = 0; a < g.d; ++a)
            if (std::abs(k[a]) > kmax) {
                s[i] = 0.0;
                return;
            }
    });
}

ScalarField dealias_23(const ScalarField& f) {
    Spectrum s = forward(f);
    dealias_23(s);
    return inverse(s);
}

VectorField dealias_23(const VectorField& v) {
    VectorField out(v.grid());
    for (int a = 0; a < v.dim(); ++a) out[a] = dealias_23(v[a]);
    return out;
}

TruncationParts fourier_truncate(const ScalarField& f, int ncut) {
    if (ncut < 1) throw Error("fourier_truncate: ncut must be >= 1");
    const Grid& g = f.grid();
    Spectrum s = forward(f);
    TruncationParts out;
    out.mean = s[0].real();
    Spectrum lo(g), hi(g);
    const double cut2 = static_cast<double>(ncut) * ncut;
    for_each_mode(g, [&](std::size_t i, const int* k, double) {
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) k2 += static_cast<double>(k[a]) * k[a];
        if (k2 == 0.0) return;
        if (k2 <= cut2)
            lo[i] = s[i];
        else
            hi[i] = s[i];
    });
    out.low = inverse(lo);
    out.high = inverse(hi);
    return out;
}

double hs_seminorm(const ScalarField& f, double s) {
    if (s < 0.0) throw Error("hs_seminorm: s must be >= 0");
    const Grid& g = f.grid();
    Spectrum sp = forward(f);
    const int nh = g.n / 2;
    double acc = 0.0;
    for_each_mode(g, [&](std::size_t i, const int* k, double w) {
        double k2 = 0.0;
        bool nyquist = false;
        for (int a = 0; a < g.d; ++a) {
            if (std::abs(k[a]) == nh) nyquist = true;
            k2 += static_cast<double>(k[a]) * k[a];
        }
        if (k2 == 0.0 || nyquist) return;
        acc += w * std::pow(kTwoPi * kTwoPi * k2, s) * std::norm(sp[i]);
    });
    return std::sqrt(acc);
}

namespace {

double weighted_mode_sum(const ScalarField& f, int power_of_k2, bool zero_nyquist) {
    const Grid& g = f.grid();
    Spectrum sp = forward(f);
    const int nh = g.n / 2;
    double acc = 0.0;
    for_each_mode(g, [&](std::size_t i, const int* k, double w) {
        double k2 = 0.0;
        bool nyquist = false;
        for (int a = 0; a < g.d; ++a) {
            if (std::abs(k[a]) == nh) nyquist = true;
            k2 += static_cast<double>(k[a]) * k[a];
        }
        if (zero_nyquist && nyquist) return;
        double wgt = 1.0;
        for (int p = 0; p < power_of_k2; ++p) wgt *= kTwoPi * kTwoPi * k2;
        acc += w * wgt * std::norm(sp[i]);
    });
    return acc;
}

}  // namespace

double grad_l2(const ScalarField& f) { return std::sqrt(weighted_mode_sum(f, 1, true)); }

double grad_l2(const VectorField& v) {
    double acc = 0.0;
    for (int a = 0; a < v.dim(); ++a) {
        double s = grad_l2(v[a]);
        acc += s * s;
    }
    return std::sqrt(acc);
}

double hess_l2(const ScalarField& f) { return std::sqrt(weighted_mode_sum(f, 2, false)); }

double hess_l2(const VectorField& v) {
    double acc = 0.0;
    for (int a = 0; a < v.dim(); ++a) {
        double s = hess_l2(v[a]);
        acc += s * s;
    }
    return std::sqrt(acc);
}

double div_l2(const VectorField& v) {
    const Grid& g = v.grid();
    std::vector<Spectrum> s;
    for (int a = 0; a < v.dim(); ++a) s.push_back(forward(v[a]));
    const int n = g.n;
    double acc = 0.0;
    for_each_mode(g, [&](std::size_t i, const int* k, double w) {
        std::complex<double> dv(0.0, 0.0);
        for (int a = 0; a < v.dim(); ++a) dv += s[a][i] * deriv_symbol(k[a], n);
        acc += w * std::norm(dv);
    });
    return std::sqrt(acc);
}

double spectral_l2_sq(const ScalarField& f) {
    Spectrum sp = forward(f);
    double acc = 0.0;
    for_each_mode(f.grid(), [&](std::size_t i, const int*, double w) {
        acc += w * std::norm(sp[i]);
    });
    return acc;
}

}  // namespace ins
