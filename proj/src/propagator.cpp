#include "qs4/propagator.hpp"

#include "qs4/error.hpp"

#include <cmath>
#include <sstream>

namespace qs4 {

void nyquist_guard(const SpectralField& F, const char* context)
{
    const double frac = spectral_mass_above(F, kGuardRadius * F.grid().nyquist());
    if (frac > kGuardTolerance) {
        std::ostringstream os;
        os << context << ": spectral mass fraction " << frac << " above " << kGuardRadius
           << " x Nyquist exceeds " << kGuardTolerance;
        throw NumericalGuardError(os.str());
    }
}

std::vector<double> dispersion_symbol(const Grid2D& g, Dispersion d)
{
    const int n = g.n();
    std::vector<double> s(g.size());
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
            const double r2 = g.xi(p1) * g.xi(p1) + g.xi(p2) * g.xi(p2);
            s[static_cast<std::size_t>(p1) * n + p2] = d == Dispersion::quartic ? r2 * r2 : -r2;
        }
    return s;
}

SpectralField evolve_spectral(const SpectralField& F, double t, Dispersion d)
{
    if (!std::isfinite(t)) throw ValidationError("evolution time must be finite");
    nyquist_guard(F, "evolve");
    const std::vector<double> sym = dispersion_symbol(F.grid(), d);
    SpectralField out = F;
    auto& c = out.coeffs();
    for (std::size_t p = 0; p < c.size(); ++p) c[p] *= std::polar(1.0, t * sym[p]);
    return out;
}

Field evolve(const Field& f, double t, Dispersion d)
{
    if (!std::isfinite(t)) throw ValidationError("evolution time must be finite");
    return dft_inverse(evolve_spectral(dft_forward(f), t, d));
}

Field evolve_quartic(const Field& f, double t) { return evolve(f, t, Dispersion::quartic); }
Field evolve_schrodinger(const Field& f, double t) { return evolve(f, t, Dispersion::schrodinger); }

Field frac_derivative(const Field& f, double s)
{
    if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("fractional order must be finite and >= 0");
    SpectralField F = dft_forward(f);
    nyquist_guard(F, "frac_derivative");
    if (s == 0.0) return f;
    const Grid2D& g = f.grid();
    const int n = g.n();
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
            const double r = std::hypot(g.xi(p1), g.xi(p2));
            F(p1, p2) *= std::pow(r, s);
        }
    return dft_inverse(F);
}

double phase_expansion(Vec2 xi, Vec2 xi_n)
{
    // the terms cancel heavily near xi = -xi_n; extended precision keeps the
    // sum accurate relative to |xi + xi_n|^4
    using ld = long double;
    const ld x1 = xi.x, x2 = xi.y, n1 = xi_n.x, n2 = xi_n.y;
    const ld a = x1 * x1 + x2 * x2;
    const ld b = n1 * n1 + n2 * n2;
    const ld c = x1 * n1 + x2 * n2;
    return static_cast<double>(a * a + 4 * a * c + 2 * a * b + 4 * c * c + 4 * b * c + b * b);
}

LinearMapA0::LinearMapA0(Vec2 direction) : dir_(direction)
{
    if (!std::isfinite(direction.x) || !std::isfinite(direction.y) ||
        std::abs(length(direction) - 1.0) > 1e-12)
        throw ValidationError("A0 direction must be a unit vector");
}

Vec2 LinearMapA0::apply(Vec2 v) const
{
    const double par = dot(v, dir_);
    const Vec2 vpar = par * dir_;
    const Vec2 vperp = v - vpar;
    return std::sqrt(2.0) * vperp + std::sqrt(6.0) * vpar;
}

double LinearMapA0::determinant() const
{
    // symmetric matrix sqrt2 I + (sqrt6 - sqrt2) d d^T
    const double s2 = std::sqrt(2.0), d = std::sqrt(6.0) - std::sqrt(2.0);
    const double a = s2 + d * dir_.x * dir_.x;
    const double b = d * dir_.x * dir_.y;
    const double c = s2 + d * dir_.y * dir_.y;
    return a * c - b * b;
}

double LinearMapA0::multiplier(Vec2 xi) const
{
    const double par = dot(xi, dir_);
    return 2.0 * norm2(xi) + 4.0 * par * par;
}

namespace {

bool in_box(double y, double L) { return y >= -0.5 * L && y < 0.5 * L; }

// e^{i y xi_p} for p = 0..n-1 by recurrence from the lowest lattice frequency
void exp_row(const Grid2D& g, double y, cplx* out)
{
    const int n = g.n();
    const cplx step = std::polar(1.0, y * g.dk());
    cplx z = std::polar(1.0, y * g.xi(0));
    // refresh from the exact value every 32 steps to keep drift at roundoff
    for (int p = 0; p < n; ++p) {
        if (p % 32 == 0) z = std::polar(1.0, y * g.xi(p));
        out[p] = z;
        z *= step;
    }
}

} // namespace

cplx evaluate_at(const SpectralField& F, Vec2 y)
{
    const Grid2D& g = F.grid();
    const double L = g.extent();
    if (!in_box(y.x, L) || !in_box(y.y, L)) return 0.0;
    const int n = g.n();
    std::vector<cplx> e1(n), e2(n);
    exp_row(g, y.x, e1.data());
    exp_row(g, y.y, e2.data());
    cplx s = 0.0;
    for (int p1 = 0; p1 < n; ++p1) {
        cplx r = 0.0;
        const cplx* row = &F.coeffs()[static_cast<std::size_t>(p1) * n];
        for (int p2 = 0; p2 < n; ++p2) r += row[p2] * e2[p2];
        s += e1[p1] * r;
    }
    return s / (L * L);
}

Field evaluate_separable(const SpectralField& F, const std::vector<double>& y1,
                         const std::vector<double>& y2)
{
    const Grid2D& g = F.grid();
    const int n = g.n();
    if (static_cast<int>(y1.size()) != n || static_cast<int>(y2.size()) != n)
        throw ValidationError("evaluate_separable: coordinate lists must have n entries");
    const double L = g.extent();
    std::vector<cplx> e1(g.size()), e2(g.size());
    for (int i = 0; i < n; ++i) {
        if (in_box(y1[i], L)) exp_row(g, y1[i], &e1[static_cast<std::size_t>(i) * n]);
        if (in_box(y2[i], L)) exp_row(g, y2[i], &e2[static_cast<std::size_t>(i) * n]);
    }
    // tmp(p1, j) = sum_p2 F(p1, p2) e2(j, p2)
    std::vector<cplx> tmp(g.size());
    const auto& c = F.coeffs();
    for (int p1 = 0; p1 < n; ++p1)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            const cplx* row = &c[static_cast<std::size_t>(p1) * n];
            const cplx* e = &e2[static_cast<std::size_t>(j) * n];
            for (int p2 = 0; p2 < n; ++p2) s += row[p2] * e[p2];
            tmp[static_cast<std::size_t>(p1) * n + j] = s;
        }
    Field out(g);
    const double scale = 1.0 / (L * L);
    for (int i = 0; i < n; ++i) {
        const cplx* e = &e1[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int p1 = 0; p1 < n; ++p1) s += e[p1] * tmp[static_cast<std::size_t>(p1) * n + j];
            out(i, j) = s * scale;
        }
    }
    return out;
}

Field apply_a0(const Field& f, const LinearMapA0& a0)
{
    const Grid2D& g = f.grid();
    if (frame_mass(f) > kFrameTolerance)
        throw ValidationError("apply_a0: field reaches the periodic boundary");
    const SpectralField F = dft_forward(f);
    const double amp = std::sqrt(std::abs(a0.determinant()));
    const int n = g.n();
    const Vec2 d = a0.direction();
    Field out(g);
    if (d.x == 0.0 || d.y == 0.0) {
        // axis-aligned: A0 is diagonal and the evaluation separates
        const Vec2 s = a0.apply({1.0, 0.0});
        const Vec2 t = a0.apply({0.0, 1.0});
        std::vector<double> y1(n), y2(n);
        for (int i = 0; i < n; ++i) {
            y1[i] = s.x * g.x(i);
            y2[i] = t.y * g.x(i);
        }
        out = evaluate_separable(F, y1, y2);
    } else {
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) out(i1, i2) = evaluate_at(F, a0.apply({g.x(i1), g.x(i2)}));
    }
    out *= cplx(amp, 0.0);
    return out;
}

} // namespace qs4
