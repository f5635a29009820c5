#include "qs4/extremizer.hpp"

#include "qs4/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qs4 {

void IterationConfig::validate() const
{
    Grid2D g(grid_n, extent);
    require(max_iters >= 1, "max_iters must be >= 1");
    require(tol_residual > 0.0 && std::isfinite(tol_residual), "tol_residual must be positive");
    require(tol_quotient_delta > 0.0 && std::isfinite(tol_quotient_delta), "tol_quotient_delta must be positive");
    require(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
    if (seed_field) {
        require(seed_field->grid() == g, "seed field grid does not match the configured grid");
    } else {
        make_gaussian(g, seed_spec.center, seed_spec.width, seed_spec.modulation);
    }
}

namespace {

struct Evaluation {
    Field lam;
    double omega;
    double quotient;
    double residual;
};

Evaluation evaluate(const Field& f, const TimeWindow& w)
{
    Field lam = el_map(f, w);
    const double omega = inner_product(f, lam).real();
    const double lam_norm = lam.norm();
    Field r = lam;
    r -= cplx(omega, 0.0) * f;
    return {std::move(lam), omega, std::pow(std::max(omega, 0.0), 1.0 / 6.0), r.norm() / lam_norm};
}

Field step(const Field& f, const Evaluation& e, double beta)
{
    Field next = cplx(1.0 - beta, 0.0) * f;
    next += cplx(beta / e.lam.norm(), 0.0) * e.lam;
    return normalized(std::move(next));
}

constexpr int kStallSteps = 5;
constexpr double kMinBeta = 1e-3;

} // namespace

ExtremizerReport run_iteration(const IterationConfig& cfg)
{
    cfg.validate();
    const Grid2D g(cfg.grid_n, cfg.extent);
    Field f = cfg.seed_field ? normalized(*cfg.seed_field)
                             : make_gaussian(g, cfg.seed_spec.center, cfg.seed_spec.width, cfg.seed_spec.modulation);

    ExtremizerReport rep;
    rep.beta = cfg.beta;
    std::optional<Field> prev_f;
    std::optional<Evaluation> prev_e;
    int stall = 0;
    rep.stop_reason = "max_iters reached";

    for (int k = 0; k < cfg.max_iters; ++k) {
        std::optional<Evaluation> e;
        try {
            e = evaluate(f, cfg.window);
        } catch (const NumericalGuardError& err) {
            rep.aborted = true;
            rep.stop_reason = err.what();
            break;
        }
        if (prev_e && e->quotient < prev_e->quotient - cfg.tol_quotient_delta) {
            rep.beta *= 0.5;
            if (rep.beta < kMinBeta) {
                rep.aborted = true;
                rep.stop_reason = "step size underflow: quotient kept decreasing";
                break;
            }
            f = step(*prev_f, *prev_e, rep.beta);
            continue;
        }
        const double dq = prev_e ? e->quotient - prev_e->quotient : std::numeric_limits<double>::infinity();
        rep.quotient_history.push_back(e->quotient);
        rep.residual_history.push_back(e->residual);
        rep.residual = e->residual;
        rep.omega = e->omega;
        rep.final_field = f;
        rep.iterations = static_cast<int>(rep.quotient_history.size());
        if (e->residual < cfg.tol_residual) {
            rep.converged = true;
            rep.stop_reason = "residual below tolerance";
            break;
        }
        stall = std::abs(dq) <= cfg.tol_quotient_delta ? stall + 1 : 0;
        if (stall >= kStallSteps) {
            rep.stop_reason = "quotient stalled";
            break;
        }
        Field next = step(f, *e, rep.beta);
        prev_f = std::move(f);
        prev_e = std::move(e);
        f = std::move(next);
    }
    return rep;
}

RecenterResult recenter(const Field& f)
{
    const Grid2D& g = f.grid();
    const double nrm2 = f.norm() * f.norm();
    require(nrm2 > 0.0, "recenter: zero field");
    const int n = g.n();
    const double cell = g.spacing() * g.spacing();

    Vec2 com{};
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const double m = std::norm(f(i1, i2)) * cell;
            com.x += g.x(i1) * m;
            com.y += g.x(i2) * m;
        }
    com = (1.0 / nrm2) * com;
    Field c = translate(f, {-com.x, -com.y});

    double r2 = 0.0;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            r2 += (g.x(i1) * g.x(i1) + g.x(i2) * g.x(i2)) * std::norm(c(i1, i2)) * cell;
    r2 /= nrm2;
    if (!(r2 > g.spacing() * g.spacing()))
        throw ValidationError("recenter: second moment below grid resolution");
    const double h = std::sqrt(r2);
    Field s = rescale(c, 1.0 / h);

    const SpectralField S = dft_forward(s);
    const std::size_t zero = static_cast<std::size_t>(n / 2) * n + n / 2;
    double maxmod = 0.0;
    std::size_t argmax = zero;
    for (std::size_t p = 0; p < S.coeffs().size(); ++p)
        if (std::abs(S.coeffs()[p]) > maxmod) {
            maxmod = std::abs(S.coeffs()[p]);
            argmax = p;
        }
    const std::size_t pin = std::abs(S.coeffs()[zero]) > 1e-14 * maxmod ? zero : argmax;
    const double phase = std::arg(S.coeffs()[pin]);
    s *= std::polar(1.0, -phase);

    SymmetryParams p;
    p.h = h;
    p.x0 = com;
    return {std::move(s), p, phase};
}

DiagnosticsSummary diagnostics(const ExtremizerReport& report, const TimeWindow& w, std::uint64_t rng_seed)
{
    DiagnosticsSummary d;
    d.converged_flag = report.converged;
    if (report.quotient_history.empty() || !report.final_field) {
        d.discrepancy_flag = true;
        return d;
    }
    const Field& f = *report.final_field;
    const TimeWindow fine(w.t_max(), 2 * w.n_t() - 1);
    try {
        const Evaluation e = evaluate(f, fine);
        d.quotient = e.quotient;
        d.residual = e.residual;
        d.quotient_discrepancy = std::abs(e.quotient - report.quotient_history.back()) / report.quotient_history.back();
        d.discrepancy_flag = d.quotient_discrepancy > 1e-2;
        const double lam_norm = e.lam.norm();
        const double radius = 0.5 * kGuardRadius * f.grid().nyquist();
        for (int k = 0; k < 10; ++k) {
            const Field gk = random_band_limited(f.grid(), radius, rng_seed * 1000003ULL + static_cast<std::uint64_t>(k));
            const cplx lhs = inner_product(gk, e.lam);
            const cplx rhs = e.omega * inner_product(gk, f);
            d.pairing_errors.push_back(std::abs(lhs - rhs) / (gk.norm() * lam_norm));
        }
        std::vector<double> sorted = d.pairing_errors;
        std::sort(sorted.begin(), sorted.end());
        d.pairing_median = 0.5 * (sorted[4] + sorted[5]);
    } catch (const Error&) {
        d.discrepancy_flag = true;
    }
    return d;
}

} // namespace qs4
