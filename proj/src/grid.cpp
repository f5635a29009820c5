#include "qs4/grid.hpp"

#include "qs4/error.hpp"
#include "qs4/fft.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace qs4 {

using std::numbers::pi;

double length(Vec2 a) { return std::hypot(a.x, a.y); }

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_finite(const std::vector<cplx>& v, const char* what)
{
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ValidationError(std::string(what) + ": non-finite entry");
}

void check_same_grid(const Grid2D& a, const Grid2D& b)
{
    if (a != b) throw ValidationError("grid mismatch");
}

} // namespace

Grid2D::Grid2D(int n, double extent) : n_(n), extent_(extent)
{
    if (!power_of_two(n) || n < 16)
        throw ValidationError("grid size must be a power of two >= 16, got " + std::to_string(n));
    if (!(extent > 0.0) || !std::isfinite(extent))
        throw ValidationError("grid extent must be positive and finite");
}

double Grid2D::dk() const { return 2.0 * pi / extent_; }
double Grid2D::nyquist() const { return pi * n_ / extent_; }

Grid2D make_grid(int n, double extent) { return Grid2D(n, extent); }

Field::Field(const Grid2D& g) : grid_(g), v_(g.size()) {}

Field::Field(const Grid2D& g, std::vector<cplx> values) : grid_(g), v_(std::move(values))
{
    if (v_.size() != g.size()) throw ValidationError("field value count does not match grid");
    check_finite(v_, "field");
}

double Field::norm() const
{
    double s = 0.0;
    for (const cplx& z : v_) s += std::norm(z);
    return std::sqrt(s) * grid_.spacing();
}

Field& Field::operator+=(const Field& o)
{
    check_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Field& Field::operator-=(const Field& o)
{
    check_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

Field& Field::operator*=(cplx s)
{
    for (cplx& z : v_) z *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

SpectralField::SpectralField(const Grid2D& g) : grid_(g), c_(g.size()) {}

SpectralField::SpectralField(const Grid2D& g, std::vector<cplx> coeffs) : grid_(g), c_(std::move(coeffs))
{
    if (c_.size() != g.size()) throw ValidationError("spectral coefficient count does not match grid");
    check_finite(c_, "spectral field");
}

double SpectralField::norm() const
{
    double s = 0.0;
    for (const cplx& z : c_) s += std::norm(z);
    return std::sqrt(s) * grid_.dk();
}

PaddedBasis::PaddedBasis(const Grid2D& g, int factor) : grid_(g), m_(g.n() * factor)
{
    if (factor < 1) throw ValidationError("padding factor must be >= 1");
    const int n = g.n();
    cell_ = (g.extent() / m_) * (g.extent() / m_);
    slot_.resize(g.size());
    sign_.resize(g.size());
    // x_j = -L/2 + j L/m, so e^{i x_j xi_k} = (-1)^k e^{2 pi i jk/m}.
    for (int p1 = 0; p1 < n; ++p1) {
        const int k1 = p1 - n / 2;
        const std::size_t s1 = static_cast<std::size_t>((k1 + m_) % m_);
        for (int p2 = 0; p2 < n; ++p2) {
            const int k2 = p2 - n / 2;
            const std::size_t s2 = static_cast<std::size_t>((k2 + m_) % m_);
            const std::size_t p = static_cast<std::size_t>(p1) * n + p2;
            slot_[p] = s1 * m_ + s2;
            sign_[p] = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
        }
    }
}

void PaddedBasis::to_physical(const cplx* coeffs, std::vector<cplx>& phys) const
{
    phys.assign(static_cast<std::size_t>(m_) * m_, cplx(0.0, 0.0));
    const double scale = 1.0 / (grid_.extent() * grid_.extent());
    for (std::size_t p = 0; p < slot_.size(); ++p) phys[slot_[p]] = coeffs[p] * (sign_[p] * scale);
    detail::fft2d(phys, m_, +1);
}

void PaddedBasis::to_spectral(std::vector<cplx>& phys, cplx* coeffs) const
{
    detail::fft2d(phys, m_, -1);
    for (std::size_t p = 0; p < slot_.size(); ++p) coeffs[p] = phys[slot_[p]] * (sign_[p] * cell_);
}

SpectralField dft_forward(const Field& f)
{
    PaddedBasis b(f.grid(), 1);
    std::vector<cplx> buf = f.values();
    SpectralField F(f.grid());
    b.to_spectral(buf, F.coeffs().data());
    return F;
}

Field dft_inverse(const SpectralField& F)
{
    PaddedBasis b(F.grid(), 1);
    std::vector<cplx> buf;
    b.to_physical(F.coeffs().data(), buf);
    return Field(F.grid(), std::move(buf));
}

cplx inner_product(const Field& f, const Field& g)
{
    check_same_grid(f.grid(), g.grid());
    cplx s(0.0, 0.0);
    const auto& a = f.values();
    const auto& b = g.values();
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    const double h = f.grid().spacing();
    return s * (h * h);
}

double l2_norm(const Field& f) { return f.norm(); }

Field normalized(Field f)
{
    const double nrm = f.norm();
    if (!(nrm > 0.0)) throw ValidationError("cannot normalize a zero field");
    f *= cplx(1.0 / nrm, 0.0);
    return f;
}

Field spectral_cutoff(const Field& f, double r_lo, double r_hi)
{
    const Grid2D& g = f.grid();
    if (!(r_lo >= 0.0) || !(r_lo < r_hi)) throw ValidationError("spectral_cutoff: need 0 <= r_lo < r_hi");
    if (std::isfinite(r_hi) && r_hi > g.nyquist() * (1.0 + 1e-12))
        throw ValidationError("spectral_cutoff: r_hi exceeds the Nyquist radius");
    SpectralField F = dft_forward(f);
    const int n = g.n();
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
            const double r = std::hypot(g.xi(p1), g.xi(p2));
            if (r < r_lo || r >= r_hi) F(p1, p2) = 0.0;
        }
    return dft_inverse(F);
}

Field make_gaussian(const Grid2D& g, Vec2 center, double width, Vec2 modulation)
{
    if (!(width > g.spacing()) || !(width < g.extent() / 8.0))
        throw ValidationError("gaussian width must satisfy L/n < width < L/8");
    if (length(modulation) >= g.nyquist()) throw ValidationError("gaussian modulation exceeds Nyquist");
    const int n = g.n();
    Field f(g);
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const double x1 = g.x(i1), x2 = g.x(i2);
            const double r2 = (x1 - center.x) * (x1 - center.x) + (x2 - center.y) * (x2 - center.y);
            const double ph = modulation.x * x1 + modulation.y * x2;
            f(i1, i2) = std::exp(-r2 / (2.0 * width * width)) * cplx(std::cos(ph), std::sin(ph));
        }
    return normalized(std::move(f));
}

Field random_field(const Grid2D& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<cplx> v(g.size());
    for (cplx& z : v) {
        const double re = nd(rng);
        const double im = nd(rng);
        z = cplx(re, im);
    }
    return Field(g, std::move(v));
}

Field random_band_limited(const Grid2D& g, double radius, std::uint64_t seed)
{
    return normalized(spectral_cutoff(random_field(g, seed), 0.0, radius));
}

double spectral_mass_above(const SpectralField& F, double radius)
{
    const Grid2D& g = F.grid();
    const int n = g.n();
    double hi = 0.0, tot = 0.0;
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
            const double m = std::norm(F(p1, p2));
            tot += m;
            if (std::hypot(g.xi(p1), g.xi(p2)) > radius) hi += m;
        }
    return tot > 0.0 ? hi / tot : 0.0;
}

double frame_mass(const Field& f)
{
    const Grid2D& g = f.grid();
    const int n = g.n();
    const double q = 0.375 * g.extent();
    double out = 0.0, tot = 0.0;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const double m = std::norm(f(i1, i2));
            tot += m;
            if (std::abs(g.x(i1)) >= q || std::abs(g.x(i2)) >= q) out += m;
        }
    return tot > 0.0 ? out / tot : 0.0;
}

} // namespace qs4
