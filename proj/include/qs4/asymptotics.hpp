#ifndef QS4_ASYMPTOTICS_HPP
#define QS4_ASYMPTOTICS_HPP

#include "qs4/fit.hpp"
#include "qs4/functional.hpp"
#include "qs4/grid.hpp"

#include <array>
#include <vector>

namespace qs4 {

struct ModulationScan {
    std::vector<double> magnitudes;
    Vec2 direction{1.0, 0.0};
    std::vector<double> raw_norms;
    std::vector<double> compensated;  // raw * magnitude^{1/3}
    double limit_reference = 0.0;     // |A0|^{-1/3} || e^{it Delta} A0~ phi ||_6
    int threshold_index = 0;          // raw norms strictly decrease from here on
    double threshold_magnitude = 0.0;
};

// For magnitude m > 0 the quartic norm of e^{i x.(m d)} phi is taken over
// t in [-t_max/m^2, t_max/m^2] with the same node count, i.e. the window is
// read in the rescaled time T = m^2 t in which the limit is stated. The
// reference uses the window as given.
ModulationScan modulation_scan(const Field& phi, const std::vector<double>& magnitudes, Vec2 direction,
                               const TimeWindow& w);

double a0_limit_reference(const Field& phi, Vec2 direction, const TimeWindow& w);

// X.xi - T (2 + 4 cos^2) |xi|^2 - T (4 |xi|^2 (xi.d) / |xi_n| + |xi|^4 / |xi_n|^2), d = xi_n / |xi_n|
double phase_phi_n(double T, Vec2 X, Vec2 xi, Vec2 xi_n);
// the |xi_n| -> infinity limit X.xi - T (2 + 4 cos^2) |xi|^2
double phase_limit(double T, Vec2 X, Vec2 xi, Vec2 direction);

// int e^{i phi_n(T, X, xi)} phi^(xi) dxi over the support of the lattice
// samples. The samples are continued by tensor-product Catmull-Rom
// interpolation and the integral is taken with 2x2 Gauss points on
// sub-cells fine enough to resolve the phase.
cplx oscillatory_integral(double T, Vec2 X, const SpectralField& phihat, Vec2 xi_n);

struct OscillatoryConstants {
    double support_radius = 0.0;  // max |xi| over the lattice support
    double c_phi = 0.0;           // int |phi^| (bounds the integral everywhere)
    double c_prime_phi = 0.0;     // 2 sup |grad_xi of the T-coefficient| over the support
};

OscillatoryConstants measure_constants(const SpectralField& phihat, Vec2 xi_n);

double dominating_function(double T, double X, double C, double Cp);

struct DominatingReport {
    std::vector<double> values;          // F at the supplied samples
    std::vector<double> boundary_T;      // boundary checks |X| = Cp |T|
    std::vector<double> boundary_inner;  // region |X| <= Cp|T| formula on the boundary
    std::vector<double> boundary_outer;  // region |X| >= Cp|T| formula on the boundary
    std::vector<double> boxes;           // B = 2^k, k = 4..8
    std::vector<double> masses;          // int over |T| <= B, |X| <= B of F^6
    std::vector<double> increments;      // masses[k+1] - masses[k]
    std::vector<double> ratios;          // increments[k+1] / increments[k]
    bool increments_decreasing = false;
    bool ratios_below_one = false;
};

struct TXSample {
    double T;
    Vec2 X;
};

DominatingReport dominating_function_check(const std::vector<TXSample>& samples, double C, double Cp);

// C-infinity bump e^{1 - 1/(1 - |xi|^2/R^2)} sampled on the lattice.
SpectralField smooth_bump(const Grid2D& g, double radius);

struct OscillatoryCheckConfig {
    int grid_n = 256;
    double extent = 256.0;
    double radius = 1.0;
    Vec2 xi_n{100.0, 0.0};
    std::vector<double> t_list{1.0, 4.0, 16.0, 64.0};
    // X = factor * C'_phi * x_time along x_direction
    std::vector<double> x_factors{10.0, 20.0, 40.0, 80.0};
    double x_time = 0.05;
    Vec2 x_direction{1.0, 0.0};
    void validate() const;
};

struct OscillatoryCheck {
    OscillatoryConstants constants;
    cplx at_origin;
    double lattice_sum = 0.0;  // sum phi^ dk^2 = (2 pi)^2 phi(0)
    std::vector<double> t_abs;
    LineFit t_fit;
    std::vector<double> x_values;
    std::vector<double> x_abs;
    std::vector<double> x_constants;  // |I| (1 + |X|)
    LineFit x_fit;
    DominatingReport dominating;
};

OscillatoryCheck oscillatory_check(const OscillatoryCheckConfig& cfg);

} // namespace qs4

#endif
