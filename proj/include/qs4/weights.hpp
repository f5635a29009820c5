#ifndef QS4_WEIGHTS_HPP
#define QS4_WEIGHTS_HPP

#include "qs4/grid.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace qs4 {

// F(eta) = mu |eta|^4 / (1 + eps |eta|^4). In coupled mode mu = s^{-8}.
struct WeightParams {
    double mu = 1.0;
    double eps = 0.0;
    double s = 1.0;
    bool coupled = false;

    static WeightParams coupled_to(double s, double eps);
    void validate() const;
};

double weight_f(Vec2 eta, const WeightParams& p);

using ConstraintTuple = std::array<Vec2, 6>;

// eta1 + eta2 + eta3 - eta4 - eta5 - eta6
Vec2 constraint_a(const ConstraintTuple& t);
// |eta1|^4 + |eta2|^4 + |eta3|^4 - |eta4|^4 - |eta5|^4 - |eta6|^4
double constraint_b(const ConstraintTuple& t);
double quartic_mass(const ConstraintTuple& t);  // sum |eta_k|^4

// eta2..eta6 uniform in the disk of the given radius; eta1 = D^{1/4} * unit
// with D chosen so that b = 0. Draws with D < 0 are rejected.
std::vector<ConstraintTuple> sample_constraint_tuples(int count, double radius, std::uint64_t rng_seed);

struct KernelReport {
    std::size_t tuples = 0;
    std::size_t violations = 0;  // kernel > 1 + 1e-12
    double max_kernel = 0.0;
    std::size_t argmax = 0;
    ConstraintTuple argmax_tuple{};
};

inline constexpr double kKernelTolerance = 1e-12;

// exp(F(eta1) - sum_{k>=2} F(eta_k)) over all tuples.
KernelReport weight_kernel_check(const std::vector<ConstraintTuple>& tuples, const WeightParams& p);

struct DecayFit {
    double mu = 0.0;           // fitted rate in log|F| ~ -mu |xi|^4 + c
    double intercept = 0.0;
    double rms_residual = 0.0; // in natural-log units
    double r_squared = 0.0;
    int shells = 0;
    bool quartic = false;      // rms_residual <= threshold
};

inline constexpr double kDecayFloor = 1e-15;
inline constexpr double kDecayResidualThreshold = 0.5;

// Shell-maximum moduli over r_min <= |xi| <= 0.8 Nyquist (shells one lattice
// spacing wide); moduli at or below kDecayFloor times the spectrum maximum
// are dropped before the fit.
DecayFit decay_fit(const SpectralField& F, double r_min, double threshold = kDecayResidualThreshold);

} // namespace qs4

#endif
