#ifndef QS4_PROFILES_HPP
#define QS4_PROFILES_HPP

#include "qs4/functional.hpp"
#include "qs4/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qs4 {

// Parameters of g -> e^{-i t0 Delta^2}[h^{-1} e^{i(x-x0).xi0} g((x-x0)/h)].
struct SymmetryParams {
    double h = 1.0;
    Vec2 x0{};
    double t0 = 0.0;
    Vec2 xi0{};

    void validate() const;
};

// Parameters of the inverse map. Only defined for xi0 = 0: with a
// modulation the inverse is not of the same form unless t0 = 0.
SymmetryParams inverse(const SymmetryParams& p);

// Exact lattice-band translation f(x - shift) via the Fourier phase.
Field translate(const Field& f, Vec2 shift);
// h^{-1} f(x / h), evaluated from the Fourier series of f (f taken as zero
// outside the box).
Field rescale(const Field& f, double h);
Field modulate(const Field& f, Vec2 xi0);

Field apply_symmetry(const Field& g, const SymmetryParams& p);

Field synthesize_sequence(const std::vector<Field>& profiles,
                          const std::vector<std::vector<SymmetryParams>>& param_seqs, double noise_amp,
                          int n_index, std::uint64_t rng_seed);

struct DecompositionResult {
    std::vector<Field> profiles;
    // params[j][n]: parameters of profile j at sequence element n
    std::vector<std::vector<SymmetryParams>> params;
    std::vector<double> energies;  // |<remainder, T phi>|^2 per stage, last element
    Field remainder;
    double l2_defect = 0.0;
    double strichartz_defect = 0.0;
};

struct OrthogonalityDefect {
    double l2_defect = 0.0;
    double strichartz_defect = 0.0;        // absolute
    double strichartz_relative = 0.0;      // divided by sum of sixth powers
    bool flagged = false;                  // defects O(1): parameters not separated
};

OrthogonalityDefect orthogonality_defect(const Field& u_n, const DecompositionResult& result, int index,
                                         const TimeWindow& w);

struct ExtractionOptions {
    std::vector<double> scales;   // dyadic candidates; empty -> {1/4 .. 8}
    int t_coarse = 9;             // coarse time grid points on [-t_max, t_max]
    double stop_fraction = 0.1;   // stop when best correlation < this * ||remainder||
};

DecompositionResult extract_profiles(const std::vector<Field>& u_seq, const Field& dictionary, int max_profiles,
                                     const TimeWindow& w, const ExtractionOptions& opt = {});

// Shipped two-profile scenario: equal Gaussians placed at x0 = -/+ 2^{n-1}
// lattice units along the first axis, sequence index n = 0 .. index.
struct ProfileDemoConfig {
    int grid_n = 128;
    double extent = 64.0;
    double t_max = 0.25;
    int n_t = 65;
    int index = 6;
    int compare_index = 2;
    double width = 1.0;
    double noise = 0.0;
    std::uint64_t seed = 1;
    int max_profiles = 2;
    void validate() const;
};

struct ProfileDemoReport {
    OrthogonalityDefect planted;          // planted decomposition at index
    OrthogonalityDefect planted_compare;  // same at compare_index
    int recovered = 0;
    std::vector<SymmetryParams> recovered_params;
    std::vector<double> profile_errors;   // per planted profile, relative L2
    std::vector<double> energies;         // extracted |coefficient|^2 per stage
};

std::vector<std::vector<SymmetryParams>> demo_parameter_sequences(const ProfileDemoConfig& cfg);
ProfileDemoReport profile_demo(const ProfileDemoConfig& cfg);

} // namespace qs4

#endif
