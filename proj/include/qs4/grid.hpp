#ifndef QS4_GRID_HPP
#define QS4_GRID_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace qs4 {

using cplx = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return dot(a, a); }
double length(Vec2 a);

// Periodic square [-L/2, L/2)^2 with n points per axis. Frequencies live on
// the lattice 2*pi*k/L, k = -n/2 .. n/2-1, stored in that (natural) order.
class Grid2D {
public:
    Grid2D(int n, double extent);

    int n() const { return n_; }
    double extent() const { return extent_; }
    double spacing() const { return extent_ / n_; }
    double dk() const;
    double nyquist() const;
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

    double x(int i) const { return -0.5 * extent_ + i * spacing(); }
    // frequency of natural-order index p (p = k + n/2)
    double xi(int p) const { return dk() * (p - n_ / 2); }

    bool operator==(const Grid2D& o) const { return n_ == o.n_ && extent_ == o.extent_; }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }

private:
    int n_;
    double extent_;
};

Grid2D make_grid(int n, double extent);

// Physical samples, row-major: values[i1 * n + i2] at (x(i1), x(i2)).
class Field {
public:
    explicit Field(const Grid2D& g);
    Field(const Grid2D& g, std::vector<cplx> values);

    const Grid2D& grid() const { return grid_; }
    std::vector<cplx>& values() { return v_; }
    const std::vector<cplx>& values() const { return v_; }
    cplx& operator()(int i1, int i2) { return v_[static_cast<std::size_t>(i1) * grid_.n() + i2]; }
    cplx operator()(int i1, int i2) const { return v_[static_cast<std::size_t>(i1) * grid_.n() + i2]; }

    double norm() const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(cplx s);

private:
    Grid2D grid_;
    std::vector<cplx> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);

// Fourier coefficients approximating F(xi) = int e^{-i x.xi} u(x) dx,
// row-major over natural-order lattice indices.
class SpectralField {
public:
    explicit SpectralField(const Grid2D& g);
    SpectralField(const Grid2D& g, std::vector<cplx> coeffs);

    const Grid2D& grid() const { return grid_; }
    std::vector<cplx>& coeffs() { return c_; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx& operator()(int p1, int p2) { return c_[static_cast<std::size_t>(p1) * grid_.n() + p2]; }
    cplx operator()(int p1, int p2) const { return c_[static_cast<std::size_t>(p1) * grid_.n() + p2]; }

    // lattice L2 norm, sum |F|^2 dk^2 (equals (2 pi)^2 ||u||^2 by Parseval)
    double norm() const;

private:
    Grid2D grid_;
    std::vector<cplx> c_;
};

SpectralField dft_forward(const Field& f);
Field dft_inverse(const SpectralField& F);

cplx inner_product(const Field& f, const Field& g);
double l2_norm(const Field& f);
Field normalized(Field f);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Keeps the spectrum on r_lo <= |xi| < r_hi.
Field spectral_cutoff(const Field& f, double r_lo, double r_hi);

Field make_gaussian(const Grid2D& g, Vec2 center, double width, Vec2 modulation);

// Seeded fields for tests and synthetic data. The band-limited variant keeps
// |xi| < radius and is L2-normalized.
Field random_field(const Grid2D& g, std::uint64_t seed);
Field random_band_limited(const Grid2D& g, double radius, std::uint64_t seed);

// Fraction of sum |F|^2 carried by |xi| > radius.
double spectral_mass_above(const SpectralField& F, double radius);

// Fraction of L2 mass in the outer frame |x|_inf >= 3L/8 of the box; large
// values mean a field has reached (or wrapped around) the periodic boundary.
double frame_mass(const Field& f);
inline constexpr double kFrameTolerance = 1e-8;

// Evaluates a band-limited spectrum on a finer physical grid of m = factor*n
// points per axis (zero padding) and projects back. Used for products that
// must not alias into the working band.
class PaddedBasis {
public:
    PaddedBasis(const Grid2D& g, int factor);

    const Grid2D& grid() const { return grid_; }
    int m() const { return m_; }
    double cell() const { return cell_; }

    // coeffs: n*n natural order -> phys: m*m samples of the trigonometric interpolant
    void to_physical(const cplx* coeffs, std::vector<cplx>& phys) const;
    // phys (overwritten) -> band coefficients on the n*n lattice
    void to_spectral(std::vector<cplx>& phys, cplx* coeffs) const;

private:
    Grid2D grid_;
    int m_;
    double cell_;
    std::vector<std::size_t> slot_;
    std::vector<double> sign_;
};

} // namespace qs4

#endif
