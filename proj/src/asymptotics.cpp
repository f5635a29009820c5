#include "qs4/asymptotics.hpp"

#include "qs4/error.hpp"
#include "qs4/parallel.hpp"
#include "qs4/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qs4 {

namespace {

void require_unit(Vec2 d)
{
    require(std::isfinite(d.x) && std::isfinite(d.y) && std::abs(length(d) - 1.0) <= 1e-12,
            "direction must be a unit vector");
}

Field plane_wave(const Field& f, Vec2 k)
{
    Field out = f;
    const Grid2D& g = f.grid();
    const int n = g.n();
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) out(i1, i2) *= std::polar(1.0, k.x * g.x(i1) + k.y * g.x(i2));
    return out;
}

} // namespace

double a0_limit_reference(const Field& phi, Vec2 direction, const TimeWindow& w)
{
    require_unit(direction);
    const LinearMapA0 a0(direction);
    const Field tilde = apply_a0(phi, a0);
    NormOptions opt;
    opt.dispersion = Dispersion::schrodinger;
    return std::pow(std::abs(a0.determinant()), -1.0 / 3.0) * spacetime_norm(tilde, 6.0, 0.0, w, opt);
}

ModulationScan modulation_scan(const Field& phi, const std::vector<double>& magnitudes, Vec2 direction,
                               const TimeWindow& w)
{
    require_unit(direction);
    require(!magnitudes.empty(), "modulation scan needs at least one magnitude");
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
        require(std::isfinite(magnitudes[i]) && magnitudes[i] >= 0.0, "magnitudes must be finite and >= 0");
        require(i == 0 || magnitudes[i] > magnitudes[i - 1], "magnitudes must be strictly increasing");
    }
    // all modulated spectra are checked before any evolution
    std::vector<Field> mods;
    for (double m : magnitudes) {
        mods.push_back(plane_wave(phi, m * direction));
        const double frac = spectral_mass_above(dft_forward(mods.back()), kGuardRadius * phi.grid().nyquist());
        if (frac > kGuardTolerance) {
            std::ostringstream os;
            os << "modulation " << m << " pushes spectral mass " << frac << " above the Nyquist guard";
            throw ValidationError(os.str());
        }
    }

    ModulationScan s;
    s.magnitudes = magnitudes;
    s.direction = direction;
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
        const double m = magnitudes[i];
        const TimeWindow wm = m > 0.0 ? TimeWindow(w.t_max() / (m * m), w.n_t()) : w;
        const double raw = spacetime_norm(mods[i], 6.0, 0.0, wm);
        s.raw_norms.push_back(raw);
        s.compensated.push_back(raw * std::cbrt(m));
    }
    int k = static_cast<int>(magnitudes.size()) - 1;
    while (k > 0 && s.raw_norms[k] < s.raw_norms[k - 1]) --k;
    s.threshold_index = k;
    s.threshold_magnitude = magnitudes[k];
    s.limit_reference = a0_limit_reference(phi, direction, w);
    return s;
}

double phase_phi_n(double T, Vec2 X, Vec2 xi, Vec2 xi_n)
{
    const double rho = length(xi_n);
    require(rho > 0.0, "phase_phi_n: xi_n must be nonzero");
    const Vec2 d = (1.0 / rho) * xi_n;
    const double r2 = norm2(xi);
    const double c = dot(xi, d);
    return dot(X, xi) - T * (2.0 * r2 + 4.0 * c * c) - T * (4.0 * r2 * c / rho + r2 * r2 / (rho * rho));
}

double phase_limit(double T, Vec2 X, Vec2 xi, Vec2 direction)
{
    require_unit(direction);
    const double c = dot(xi, direction);
    return dot(X, xi) - T * (2.0 * norm2(xi) + 4.0 * c * c);
}

namespace {

struct Support {
    int lo1, hi1, lo2, hi2;
    double radius;
};

Support lattice_support(const SpectralField& F)
{
    const Grid2D& g = F.grid();
    const int n = g.n();
    Support s{n, -1, n, -1, 0.0};
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
            if (F(p1, p2) == cplx(0.0, 0.0)) continue;
            s.lo1 = std::min(s.lo1, p1);
            s.hi1 = std::max(s.hi1, p1);
            s.lo2 = std::min(s.lo2, p2);
            s.hi2 = std::max(s.hi2, p2);
            s.radius = std::max(s.radius, std::hypot(g.xi(p1), g.xi(p2)));
        }
    if (s.hi1 < 0) throw ValidationError("oscillatory integral: empty spectral support");
    return s;
}

// bound on |grad of the T-coefficient| for |xi| <= r
double coefficient_gradient(double r, double rho)
{
    return 12.0 * r + 12.0 * r * r / rho + 4.0 * r * r * r / (rho * rho);
}

// Quadrature nodes along one axis: Catmull-Rom stencil base and weights,
// frequency, and Gauss weight.
struct AxisNodes {
    std::vector<int> base;
    std::vector<std::array<double, 4>> w;
    std::vector<double> xi;
    std::vector<double> qw;
};

// Largest phase change allowed across one sub-cell.
constexpr double kPhaseStep = 0.5;

AxisNodes axis_nodes(const Grid2D& g, int lo, int hi, int r)
{
    const int n = g.n();
    const double dk = g.dk();
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    AxisNodes a;
    const int c0 = std::max(0, lo - 2), c1 = std::min(n - 2, hi + 1);
    for (int c = c0; c <= c1; ++c)
        for (int s = 0; s < r; ++s)
            for (double q : gp) {
                const double u = (s + q) / r;
                const double u2 = u * u, u3 = u2 * u;
                a.base.push_back(c - 1);
                a.w.push_back({0.5 * (-u3 + 2.0 * u2 - u), 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0),
                               0.5 * (-3.0 * u3 + 4.0 * u2 + u), 0.5 * (u3 - u2)});
                a.xi.push_back(g.xi(c) + u * dk);
                a.qw.push_back(0.5 * dk / r);
            }
    return a;
}

} // namespace

cplx oscillatory_integral(double T, Vec2 X, const SpectralField& phihat, Vec2 xi_n)
{
    require(std::isfinite(T) && std::isfinite(X.x) && std::isfinite(X.y), "T and X must be finite");
    require(length(xi_n) > 0.0, "oscillatory integral: xi_n must be nonzero");
    const Support sup = lattice_support(phihat);
    const Grid2D& g = phihat.grid();
    const int n = g.n();
    const double dk = g.dk();

    const double reach = sup.radius + 2.0 * std::sqrt(2.0) * dk;
    const double grad = length(X) + std::abs(T) * coefficient_gradient(reach, length(xi_n));
    const int r = std::max(1, static_cast<int>(std::ceil(grad * dk / kPhaseStep)));
    const AxisNodes a1 = axis_nodes(g, sup.lo1, sup.hi1, r);
    const AxisNodes a2 = axis_nodes(g, sup.lo2, sup.hi2, r);
    const int m1 = static_cast<int>(a1.xi.size()), m2 = static_cast<int>(a2.xi.size());

    auto sample = [&](int p1, int p2) -> cplx {
        if (p1 < 0 || p1 >= n || p2 < 0 || p2 >= n) return {0.0, 0.0};
        return phihat(p1, p2);
    };
    // contract along axis 2 first: rows p1 in the stencil range of axis 1
    const int r_lo = std::max(0, sup.lo1 - 3), r_hi = std::min(n - 1, sup.hi1 + 3);
    std::vector<cplx> rows(static_cast<std::size_t>(r_hi - r_lo + 1) * m2);
    for (int p1 = r_lo; p1 <= r_hi; ++p1)
        for (int b = 0; b < m2; ++b) {
            cplx v = 0.0;
            for (int j = 0; j < 4; ++j) v += a2.w[b][j] * sample(p1, a2.base[b] + j);
            rows[static_cast<std::size_t>(p1 - r_lo) * m2 + b] = v;
        }

    std::vector<cplx> partial(m1);
    parallel_for(m1, [&](int a) {
        cplx acc = 0.0;
        for (int b = 0; b < m2; ++b) {
            cplx v = 0.0;
            for (int i = 0; i < 4; ++i) {
                const int p1 = a1.base[a] + i;
                if (p1 < r_lo || p1 > r_hi) continue;
                v += a1.w[a][i] * rows[static_cast<std::size_t>(p1 - r_lo) * m2 + b];
            }
            if (v == cplx(0.0, 0.0)) continue;
            const double ph = phase_phi_n(T, X, {a1.xi[a], a2.xi[b]}, xi_n);
            acc += a2.qw[b] * v * std::polar(1.0, ph);
        }
        partial[a] = a1.qw[a] * acc;
    });
    cplx total = 0.0;
    for (const cplx& v : partial) total += v;
    return total;
}

OscillatoryConstants measure_constants(const SpectralField& phihat, Vec2 xi_n)
{
    require(length(xi_n) > 0.0, "xi_n must be nonzero");
    const Support sup = lattice_support(phihat);
    const double dk = phihat.grid().dk();
    OscillatoryConstants c;
    c.support_radius = sup.radius;
    for (const cplx& v : phihat.coeffs()) c.c_phi += std::abs(v);
    c.c_phi *= dk * dk;
    c.c_prime_phi = 2.0 * coefficient_gradient(sup.radius, length(xi_n));
    return c;
}

double dominating_function(double T, double X, double C, double Cp)
{
    const double base = (1.0 + std::abs(T)) * (1.0 + std::abs(X));
    return std::abs(X) <= Cp * std::abs(T) ? C * std::pow(base, -0.25) : C * std::pow(base, -0.5);
}

namespace {

// int_0^R r (1+r)^{-a} dr for a = 3/2 and a = 3, with u = 1 + r
double radial_inner(double R)
{
    auto prim = [](double u) { return 2.0 * std::sqrt(u) + 2.0 / std::sqrt(u); };
    return prim(1.0 + R) - prim(1.0);
}

double radial_outer(double R)
{
    auto prim = [](double u) { return -1.0 / u + 0.5 / (u * u); };
    return prim(1.0 + R) - prim(1.0);
}

// int over |T| <= B, |X| <= B (X in the plane) of F^6
double box_mass(double B, double C, double Cp)
{
    auto slice = [&](double T) {
        const double edge = std::min(Cp * T, B);
        const double in = std::pow(1.0 + T, -1.5) * radial_inner(edge);
        const double out = std::pow(1.0 + T, -3.0) * (radial_outer(B) - radial_outer(edge));
        return 2.0 * M_PI * (in + out);
    };
    // Simpson in s = log(1 + T), split at the region kink T = B / Cp
    auto simpson = [&](double t0, double t1) {
        if (t1 <= t0) return 0.0;
        const int m = 4000;
        const double s0 = std::log1p(t0), s1 = std::log1p(t1), h = (s1 - s0) / m;
        double acc = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double s = s0 + i * h;
            const double T = std::expm1(s);
            const double wgt = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += wgt * slice(T) * std::exp(s);
        }
        return acc * h / 3.0;
    };
    const double kink = Cp > 0.0 ? std::min(B, B / Cp) : B;
    const double half = simpson(0.0, kink) + simpson(kink, B);
    return 2.0 * std::pow(C, 6) * half;
}

} // namespace

DominatingReport dominating_function_check(const std::vector<TXSample>& samples, double C, double Cp)
{
    require(C > 0.0 && Cp > 0.0 && std::isfinite(C) && std::isfinite(Cp), "constants must be positive");
    DominatingReport r;
    for (const TXSample& s : samples) {
        r.values.push_back(dominating_function(s.T, length(s.X), C, Cp));
        const double T = std::abs(s.T);
        const double base = (1.0 + T) * (1.0 + Cp * T);
        r.boundary_T.push_back(s.T);
        r.boundary_inner.push_back(C * std::pow(base, -0.25));
        r.boundary_outer.push_back(C * std::pow(base, -0.5));
    }
    for (int k = 4; k <= 8; ++k) {
        r.boxes.push_back(std::ldexp(1.0, k));
        r.masses.push_back(box_mass(r.boxes.back(), C, Cp));
    }
    for (std::size_t k = 1; k < r.masses.size(); ++k) r.increments.push_back(r.masses[k] - r.masses[k - 1]);
    for (std::size_t k = 1; k < r.increments.size(); ++k)
        r.ratios.push_back(r.increments[k] / r.increments[k - 1]);
    r.increments_decreasing = true;
    for (std::size_t k = 1; k < r.increments.size(); ++k)
        if (!(r.increments[k] < r.increments[k - 1])) r.increments_decreasing = false;
    r.ratios_below_one = std::all_of(r.ratios.begin(), r.ratios.end(), [](double q) { return q < 1.0; });
    return r;
}

} // namespace qs4

namespace qs4 {

SpectralField smooth_bump(const Grid2D& g, double radius)
{
    require(radius > 2.0 * g.dk() && radius < kGuardRadius * g.nyquist(),
            "bump radius must span a few lattice cells and stay below the guard radius");
    SpectralField F(g);
    const int n = g.n();
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
            const double q = (g.xi(p1) * g.xi(p1) + g.xi(p2) * g.xi(p2)) / (radius * radius);
            if (q < 1.0) F(p1, p2) = std::exp(1.0 - 1.0 / (1.0 - q));
        }
    return F;
}

void OscillatoryCheckConfig::validate() const
{
    const Grid2D g(grid_n, extent);
    require(radius > 2.0 * g.dk() && radius < kGuardRadius * g.nyquist(), "bump radius out of range");
    require(length(xi_n) > 0.0, "xi_n must be nonzero");
    require(t_list.size() >= 2 && x_factors.size() >= 2, "decay fits need at least two samples");
    for (double t : t_list) require(t > 0.0 && std::isfinite(t), "T samples must be positive");
    for (double f : x_factors) require(f > 0.0 && std::isfinite(f), "X factors must be positive");
    require(x_time >= 0.0 && std::isfinite(x_time), "x_time must be >= 0");
    require_unit(x_direction);
}

OscillatoryCheck oscillatory_check(const OscillatoryCheckConfig& cfg)
{
    cfg.validate();
    const Grid2D g(cfg.grid_n, cfg.extent);
    const SpectralField phi = smooth_bump(g, cfg.radius);
    OscillatoryCheck c;
    c.constants = measure_constants(phi, cfg.xi_n);
    for (const cplx& v : phi.coeffs()) c.lattice_sum += v.real();
    c.lattice_sum *= g.dk() * g.dk();
    c.at_origin = oscillatory_integral(0.0, {0.0, 0.0}, phi, cfg.xi_n);

    for (double T : cfg.t_list) c.t_abs.push_back(std::abs(oscillatory_integral(T, {0.0, 0.0}, phi, cfg.xi_n)));
    c.t_fit = fit_loglog(cfg.t_list, c.t_abs);

    std::vector<double> one_plus;
    for (double f : cfg.x_factors) {
        const double X = f * c.constants.c_prime_phi * cfg.x_time;
        const double v = std::abs(oscillatory_integral(cfg.x_time, X * cfg.x_direction, phi, cfg.xi_n));
        c.x_values.push_back(X);
        c.x_abs.push_back(v);
        c.x_constants.push_back(v * (1.0 + X));
        one_plus.push_back(1.0 + X);
    }
    c.x_fit = fit_loglog(one_plus, c.x_abs);

    std::vector<TXSample> samples;
    for (double T : cfg.t_list) samples.push_back({T, {0.0, 0.0}});
    for (double X : c.x_values) samples.push_back({cfg.x_time, X * cfg.x_direction});
    c.dominating = dominating_function_check(samples, c.constants.c_phi, c.constants.c_prime_phi);
    return c;
}

} // namespace qs4
