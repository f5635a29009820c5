#ifndef QS4_PROPAGATOR_HPP
#define QS4_PROPAGATOR_HPP

#include "qs4/grid.hpp"

#include <vector>

namespace qs4 {

// Multipliers refuse spectra with more than this fraction of |F|^2 above
// kGuardRadius * Nyquist.
inline constexpr double kGuardRadius = 0.9;
inline constexpr double kGuardTolerance = 1e-8;

void nyquist_guard(const SpectralField& F, const char* context);

enum class Dispersion {
    quartic,     // e^{it Delta^2}: multiplier e^{it|xi|^4}
    schrodinger  // e^{it Delta}:   multiplier e^{-it|xi|^2}
};

// Phase per unit time for each lattice frequency (natural order).
std::vector<double> dispersion_symbol(const Grid2D& g, Dispersion d);

Field evolve(const Field& f, double t, Dispersion d);
Field evolve_quartic(const Field& f, double t);
Field evolve_schrodinger(const Field& f, double t);
SpectralField evolve_spectral(const SpectralField& F, double t, Dispersion d);

Field frac_derivative(const Field& f, double s);

// Six-term expansion of |xi + xi_n|^4.
double phase_expansion(Vec2 xi, Vec2 xi_n);

// xi -> sqrt(2) xi_perp + sqrt(6) xi_par, with xi_par the component along `direction`.
class LinearMapA0 {
public:
    explicit LinearMapA0(Vec2 direction);

    Vec2 direction() const { return dir_; }
    Vec2 apply(Vec2 v) const;
    double determinant() const;
    // (2 + 4 cos^2 theta) |xi|^2 with cos theta measured against the direction
    double multiplier(Vec2 xi) const;

private:
    Vec2 dir_;
};

// |det A0|^{1/2} f(A0 x), evaluated from the Fourier series of f; f is taken
// to vanish outside the periodic box.
Field apply_a0(const Field& f, const LinearMapA0& a0);

// Values of the trigonometric interpolant of F at off-grid points, zero
// outside [-L/2, L/2)^2.
cplx evaluate_at(const SpectralField& F, Vec2 y);
// Tensor-product version: result(i, j) = f(y1[i], y2[j]) on F's grid shape.
Field evaluate_separable(const SpectralField& F, const std::vector<double>& y1,
                         const std::vector<double>& y2);

} // namespace qs4

#endif
