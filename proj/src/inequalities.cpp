#include "ins/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ins/norms.hpp"
#include "ins/scenario.hpp"
#include "ins/spectral.hpp"

namespace ins::ineq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kE = std::numbers::e;
}  // namespace

Sample sample_random_field(const FieldEnsemble& e, int index) {
    if (index < 0 || index >= e.count) throw Error("sample_random_field: index out of range");
    Grid g{e.n, 2};
    Sample s;
    s.z = random_spectral_field(g, e.spectrum_decay, mix_seed(e.seed, 2 * index));

    switch (e.density_model) {
        case DensityModel::constant:
            s.a = ScalarField(g, e.M);
            break;
        case DensityModel::patch: {
            SplitMix64 rng(mix_seed(e.seed, 2 * index + 1));
            const double cx = rng.uniform();
            const double cy = rng.uniform();
            const double area = e.area_min + (e.area_max - e.area_min) * rng.uniform();
            const double r2 = area / std::numbers::pi;
            s.a = ScalarField::sample(g, [&](double x, double y) {
                return solver::torus_dist2(x, y, cx, cy) < r2 ? e.rho_star : 0.0;
            });
            break;
        }
        case DensityModel::clipped_random: {
            ScalarField raw =
                random_spectral_field(g, 2.0, mix_seed(e.seed, 2 * index + 1));
            double amp = 0.0;
            for (std::size_t i = 0; i < raw.size(); ++i)
                amp = std::max(amp, std::abs(raw[i]));
            s.a = ScalarField(g);
            const double scale = amp > 0.0 ? e.M / amp : 0.0;
            for (std::size_t i = 0; i < raw.size(); ++i) {
                const double val = e.M + scale * raw[i];
                s.a[i] = std::min(std::max(val, 0.0), e.rho_star);
            }
            break;
        }
    }
    return s;
}

PoincareResult weighted_poincare_check(const ScalarField& a, const ScalarField& z) {
    PoincareResult out;
    out.M = integral(a);
    if (out.M <= 0.0) throw DegenerateWeight("weighted_poincare_check: M = int a must be > 0");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < 0.0) throw DegenerateWeight("weighted_poincare_check: a must be nonnegative");
    out.lhs = lp_norm(z, 2.0);
    ScalarField aM = a;
    for (std::size_t i = 0; i < aM.size(); ++i) aM[i] = out.M - a[i];
    out.rhs = std::abs(inner_l2(a, z)) / out.M +
              (1.0 + lp_norm(aM, 2.0) / out.M) * grad_l2(z);
    return out;
}

LogPoincareResult log_poincare_check(const ScalarField& a, const ScalarField& z) {
    if (a.grid().d != 2) throw Error("log_poincare_check: d = 2 only");
    LogPoincareResult out;
    out.M = integral(a);
    if (out.M <= 0.0) throw DegenerateWeight("log_poincare_check: M = int a must be > 0");
    ScalarField aM = a;
    for (std::size_t i = 0; i < aM.size(); ++i) aM[i] = a[i] - out.M;
    out.lhs = lp_norm(z, 2.0) - std::abs(inner_l2(a, z)) / out.M;
    out.rhs_without_C =
        std::sqrt(std::log(kE + lp_norm(aM, 2.0) / out.M)) * grad_l2(z);
    if (out.lhs <= 0.0 || out.rhs_without_C <= 0.0) {
        out.skipped = true;
        out.ratio = 0.0;
    } else {
        out.ratio = out.lhs / out.rhs_without_C;
    }
    return out;
}

double ladyzhenskaya_ratio(const ScalarField& z) {
    if (z.grid().d != 2) throw Error("ladyzhenskaya_ratio: d = 2 only");
    const double gz = grad_l2(z);
    const double l2 = lp_norm(z, 2.0);
    if (gz == 0.0 || l2 == 0.0)
        throw Error("ladyzhenskaya_ratio: constant z is degenerate");
    const double l4 = lp_norm(z, 4.0);
    return l4 * l4 / (l2 * gz);
}

DesjardinsResult desjardins_check(const ScalarField& rho, const ScalarField& z,
                                  double rho_star) {
    if (rho.grid().d != 2) throw Error("desjardins_check: d = 2 only");
    const double M = integral(rho);
    if (M <= 0.0) throw DegenerateWeight("desjardins_check: M = int rho must be > 0");
    DesjardinsResult out;
    const double hv = rho.grid().cell_volume();
    double rz4 = 0.0, rz2 = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double z2 = z[i] * z[i];
        rz4 += rho[i] * z2 * z2;
        rz2 += rho[i] * z2;
    }
    rz4 *= hv;
    rz2 *= hv;
    out.lhs = std::sqrt(rz4);
    const double sq_rz = std::sqrt(rz2);
    if (sq_rz == 0.0)
        throw VacuumSupport("desjardins_check: z is supported in the vacuum set of rho");
    const double gz = grad_l2(z);
    ScalarField rM = rho;
    for (std::size_t i = 0; i < rM.size(); ++i) rM[i] = rho[i] - M;
    const double dev = lp_norm(rM, 2.0);
    const double logarg = kE + dev * dev / (M * M) + rho_star * gz * gz / rz2;
    out.rhs_core = sq_rz * gz * std::sqrt(std::log(logarg));
    out.mean_term = sq_rz * std::abs(mean(z));
    const double denom = out.rhs_core + out.mean_term;
    out.ratio_proof_form = denom > 0.0 ? out.lhs / denom : kInfinity;
    out.counterexample_headline = (out.rhs_core == 0.0 && out.lhs > 0.0);
    return out;
}

TruncationBounds truncation_bounds(const ScalarField& z, int ncut) {
    if (z.grid().d != 2) throw Error("truncation_bounds: d = 2 only");
    if (ncut < 2) throw Error("truncation_bounds: n must be >= 2");
    TruncationBounds out;
    TruncationParts parts = fourier_truncate(z, ncut);
    out.linf_low = lp_norm(parts.low, kInfinity);
    out.tail_hhalf = hs_seminorm(parts.high, 0.5);
    const double gz = grad_l2(z);
    // lattice sum over the grid modes actually present in the low part
    const Grid& g = z.grid();
    const int nh = g.n / 2;
    double lattice = 0.0;
    for_each_mode(g, [&](std::size_t, const int* k, double w) {
        const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
        if (k2 == 0.0 || k2 > static_cast<double>(ncut) * ncut) return;
        if (std::abs(k[0]) == nh || std::abs(k[1]) == nh) return;
        lattice += w / (kTwoPi * kTwoPi * k2);
    });
    out.sqrtlog_bound = std::sqrt(lattice) * gz;
    out.tail_bound = gz / std::sqrt(kTwoPi * ncut);
    return out;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
const double kGx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                       0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                       0.9445750230732326, 0.9894009349916499};
const double kGw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                       0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                       0.0622535239386479, 0.0271524594117541};

double gauss16(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i)
        acc += kGw[i] * (f(c - h * kGx[i]) + f(c + h * kGx[i]));
    return acc * h;
}

inline double xlnx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double dyadic_gauss(const std::function<double(double)>& f, double a, double b, int levels) {
    double acc = 0.0;
    double hi = b;
    for (int l = 0; l < levels; ++l) {
        const double lo = a + (hi - a) * 0.5;
        acc += gauss16(f, lo, hi);
        hi = lo;
        if (hi - a <= 0.0) break;
    }
    return acc;
}

double fractional_c_alpha_exact(double alpha, double T) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw Error("fractional_c_alpha: alpha in (0, 1/2)");
    if (T <= 0.0) throw Error("fractional_c_alpha: T > 0 required");
    // inner double integral in closed form:
    //   int_0^{T-h} ln((t+h)/t) dt = T ln T - h ln h - (T-h) ln (T-h)
    auto f = [&](double h) {
        const double g = xlnx(T) - xlnx(h) - xlnx(T - h);
        return std::pow(h, 2.0 * alpha - 2.0) * g;
    };
    return dyadic_gauss(f, 0.0, T);
}

double fractional_c_alpha(double alpha, double T) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw Error("fractional_c_alpha: alpha in (0, 1/2)");
    if (T <= 0.0) throw Error("fractional_c_alpha: T > 0 required");
    const double ta = 2.0 * alpha;
    // inner(t) = int_0^{T-t} u^{2a-1}/(u+t) du - T^{2a-1} (ln T - ln t)
    auto inner = [&](double t) {
        const double U = T - t;
        // substitute u = x^{1/(2a)}: bounded integrand on [0, U^{2a}]
        auto fi = [&](double x) {
            const double u = std::pow(x, 1.0 / ta);
            return 1.0 / (ta * (u + t));
        };
        const double part = dyadic_gauss(fi, 0.0, std::pow(U, ta), 100);
        return part - std::pow(T, ta - 1.0) * (std::log(T) - std::log(t));
    };
    return dyadic_gauss(inner, 0.0, T, 100) / (1.0 - ta);
}

namespace {

template <class NormAt, class NormDiff>
FractionalNormResult fractional_core(const std::vector<double>& times, std::size_t count,
                                     double alpha, NormAt&& norm_at, NormDiff&& norm_diff) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw Error("fractional_time_norm: alpha must be in (0, 1/2)");
    if (count < 3) throw Error("fractional_time_norm: need >= 3 samples");
    const double dt = times[1] - times[0];
    for (std::size_t i = 1; i + 1 < count; ++i)
        if (std::abs((times[i + 1] - times[i]) - dt) > 1e-9 * std::max(dt, 1.0))
            throw Error("fractional_time_norm: uniform time grid required");

    FractionalNormResult out;
    const double T = times.back() - times.front();
    out.c_alpha_T = fractional_c_alpha(alpha, T);

    std::vector<double> np(count);
    for (std::size_t i = 0; i < count; ++i) np[i] = norm_at(i);
    for (std::size_t i = 0; i + 1 < count; ++i)
        out.l2_sq += 0.5 * (np[i] * np[i] + np[i + 1] * np[i + 1]) * dt;

    // per gap m: exact integral of h^{2a-2} over the cell [(m-1/2)dt, (m+1/2)dt]
    // times the trapezoid in t of the squared increment at that gap
    const double ea = 2.0 * alpha - 1.0;
    for (std::size_t m = 1; m < count; ++m) {
        const double h_lo = (m - 0.5) * dt;
        const double h_hi = std::min((m + 0.5) * dt, times.back() - times.front());
        const double w = (std::pow(h_hi, ea) - std::pow(h_lo, ea)) / ea;
        double tsum = 0.0;
        for (std::size_t i = 0; i + m < count; ++i) {
            const double d = norm_diff(i, i + m);
            const double tw = (i == 0 || i + m + 1 == count) ? 0.5 : 1.0;
            tsum += tw * d * d * dt;
        }
        out.seminorm_sq += w * tsum;
    }

    for (std::size_t i = 0; i + 1 < count; ++i) {
        const double tm = 0.5 * (times[i] + times[i + 1]) - times.front();
        const double zd = norm_diff(i, i + 1) / dt;
        out.weighted_zt_sq += tm * zd * zd * dt;
    }

    out.norm = std::sqrt(out.l2_sq + out.seminorm_sq);
    out.bound_rhs = std::sqrt(out.l2_sq + out.c_alpha_T * out.weighted_zt_sq);
    return out;
}

}  // namespace

FractionalNormResult fractional_time_norm(const std::vector<double>& times,
                                          const std::vector<ScalarField>& z, double alpha,
                                          double p) {
    if (times.size() != z.size()) throw Error("fractional_time_norm: size mismatch");
    auto norm_at = [&](std::size_t i) { return lp_norm(z[i], p); };
    auto norm_diff = [&](std::size_t i, std::size_t j) {
        ScalarField d = z[j];
        d -= z[i];
        return lp_norm(d, p);
    };
    return fractional_core(times, z.size(), alpha, norm_at, norm_diff);
}

FractionalNormResult fractional_time_norm(const std::vector<double>& times,
                                          const std::vector<VectorField>& z, double alpha,
                                          double p) {
    if (times.size() != z.size()) throw Error("fractional_time_norm: size mismatch");
    auto norm_at = [&](std::size_t i) { return lp_norm(z[i], p); };
    auto norm_diff = [&](std::size_t i, std::size_t j) {
        VectorField d = z[j];
        d -= z[i];
        return lp_norm(d, p);
    };
    return fractional_core(times, z.size(), alpha, norm_at, norm_diff);
}

}  // namespace ins::ineq
