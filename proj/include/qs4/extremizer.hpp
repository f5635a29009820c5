#ifndef QS4_EXTREMIZER_HPP
#define QS4_EXTREMIZER_HPP

#include "qs4/functional.hpp"
#include "qs4/grid.hpp"
#include "qs4/profiles.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qs4 {

struct GaussianSeed {
    Vec2 center{};
    double width = 1.0;
    Vec2 modulation{};
};

struct IterationConfig {
    int grid_n = 128;
    double extent = 16.0;
    int max_iters = 200;
    double tol_residual = 1e-3;
    double tol_quotient_delta = 1e-9;
    double beta = 1.0;  // 1 = plain fixed point, (0,1) damped
    GaussianSeed seed_spec{};
    std::optional<Field> seed_field;  // overrides seed_spec when set
    TimeWindow window{2.0, 129};
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct ExtremizerReport {
    std::vector<double> quotient_history;
    std::vector<double> residual_history;
    std::optional<Field> final_field;
    double residual = 0.0;
    double omega = 0.0;
    bool converged = false;
    int iterations = 0;
    double beta = 1.0;
    bool aborted = false;
    std::string stop_reason;
};

// Damped normalized fixed point f <- normalize((1-b) f + b Lambda(f)/||Lambda(f)||)
// with an ascent guard that halves b whenever the quotient drops.
ExtremizerReport run_iteration(const IterationConfig& cfg);

struct RecenterResult {
    Field field;
    SymmetryParams params;  // f = e^{i phase} apply_symmetry(field, params)
    double phase = 0.0;
};

RecenterResult recenter(const Field& f);

struct DiagnosticsSummary {
    double quotient = 0.0;          // recomputed at doubled time resolution
    double residual = 0.0;
    double quotient_discrepancy = 0.0;  // relative, against the report
    bool discrepancy_flag = false;
    bool converged_flag = false;
    std::vector<double> pairing_errors;
    double pairing_median = 0.0;
};

DiagnosticsSummary diagnostics(const ExtremizerReport& report, const TimeWindow& w, std::uint64_t rng_seed = 1);

} // namespace qs4

#endif
