#ifndef QS4_BILINEAR_HPP
#define QS4_BILINEAR_HPP

#include "qs4/fit.hpp"
#include "qs4/functional.hpp"
#include "qs4/grid.hpp"

#include <cstdint>
#include <vector>

namespace qs4 {

// f with spectrum in |xi| <= s, g with spectrum in Ns <= |eta| < 2Ns.
struct SeparatedPair {
    Field f;
    Field g;
    double s = 0.0;
    double N = 0.0;
};

// Both members start from independent seeded complex white noise multiplied
// by a Gaussian envelope of the given width (<= 0 means no envelope), so the
// pair is spatially localized around the origin before filtering.
SeparatedPair make_separated_pair(const Grid2D& grid, double s, double N, std::uint64_t seed,
                                  double envelope = -1.0);

// Spectral mass of f outside |xi| <= s plus that of g outside the annulus,
// relative to the respective totals.
double support_leak(const SeparatedPair& pair);

// || e^{it Delta^2} f * e^{it Delta^2} g ||_{L^3_{t,x}}; the product is formed
// on a grid whose Nyquist radius exceeds the sum of the two spectral radii.
double product_norm_l3(const Field& f, const Field& g, const TimeWindow& w,
                       double tail_tolerance = kTailTolerance);
double product_norm_l3(const SeparatedPair& pair, const TimeWindow& w, double tail_tolerance = kTailTolerance);

struct BilinearScan {
    std::vector<double> N;
    std::vector<double> medians;
    std::vector<std::vector<double>> values;  // values[i][k]: N[i], seeds[k]
    LineFit fit;
    bool reliable = false;         // rms residual <= 0.1
    double weak_constant = 0.0;    // max_N median * N^{1/3}
    double sharp_reference = -5.0 / 6.0;
    double weak_reference = -1.0 / 3.0;
};

// Validates every scan point before computing anything.
void validate_decay_scan(const Grid2D& grid, double s, const std::vector<double>& N_list,
                         const std::vector<std::uint64_t>& seeds);

// The window is given for the first N. The high-frequency member crosses the
// low-frequency one in a time proportional to N^{-3}, and on the periodic box
// it comes back around after a comparable time, so each N gets the window
// t_max (N_0/N)^3 with the same node count.
TimeWindow scan_window(const TimeWindow& w, double N0, double N);
BilinearScan decay_scan(const Grid2D& grid, double s, const std::vector<double>& N_list,
                        const std::vector<std::uint64_t>& seeds, const TimeWindow& w, double envelope = -1.0);

// 4 |eta_1 |eta|^2 - xi_1 |xi|^2|
double jacobian_det(Vec2 xi, Vec2 eta);
// |det| of the 4x4 matrix with rows (1,0,1,0), (0,1,0,1),
// (4 xi|xi|^2, 4 eta|eta|^2), (0,1,0,0), by Gaussian elimination.
double jacobian_det_numeric(Vec2 xi, Vec2 eta);

} // namespace qs4

#endif
