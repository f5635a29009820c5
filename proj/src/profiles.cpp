#include "qs4/profiles.hpp"

#include "qs4/error.hpp"
#include "qs4/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qs4 {

void SymmetryParams::validate() const
{
    require(h > 0.0 && std::isfinite(h), "symmetry scale h must be positive and finite");
    require(std::isfinite(x0.x) && std::isfinite(x0.y) && std::isfinite(t0) && std::isfinite(xi0.x) &&
                std::isfinite(xi0.y),
            "symmetry parameters must be finite");
}

SymmetryParams inverse(const SymmetryParams& p)
{
    p.validate();
    if (p.xi0.x != 0.0 || p.xi0.y != 0.0)
        throw ValidationError("inverse: only defined for zero modulation");
    SymmetryParams q;
    q.h = 1.0 / p.h;
    q.x0 = (-1.0 / p.h) * p.x0;
    q.t0 = -p.t0 / std::pow(p.h, 4);
    return q;
}

Field translate(const Field& f, Vec2 shift)
{
    SpectralField F = dft_forward(f);
    const Grid2D& g = f.grid();
    const int n = g.n();
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) F(p1, p2) *= std::polar(1.0, -(shift.x * g.xi(p1) + shift.y * g.xi(p2)));
    return dft_inverse(F);
}

Field rescale(const Field& f, double h)
{
    require(h > 0.0 && std::isfinite(h), "rescale: h must be positive");
    const Grid2D& g = f.grid();
    const int n = g.n();
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = g.x(i) / h;
    Field out = evaluate_separable(dft_forward(f), y, y);
    out *= cplx(1.0 / h, 0.0);
    return out;
}

Field modulate(const Field& f, Vec2 xi0)
{
    const Grid2D& g = f.grid();
    const int n = g.n();
    Field out = f;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) out(i1, i2) *= std::polar(1.0, xi0.x * g.x(i1) + xi0.y * g.x(i2));
    return out;
}

Field apply_symmetry(const Field& g, const SymmetryParams& p)
{
    p.validate();
    Field u = g;
    if (p.h != 1.0) u = rescale(u, p.h);
    if (p.xi0.x != 0.0 || p.xi0.y != 0.0) u = modulate(u, p.xi0);
    if (p.x0.x != 0.0 || p.x0.y != 0.0) u = translate(u, p.x0);
    if (p.t0 != 0.0) u = evolve_quartic(u, -p.t0);
    if (frame_mass(u) > kFrameTolerance)
        throw ValidationError("apply_symmetry: transformed field leaves the periodization-safe region");
    nyquist_guard(dft_forward(u), "apply_symmetry");
    return u;
}

namespace {

bool same_params(const SymmetryParams& a, const SymmetryParams& b)
{
    return a.h == b.h && a.x0.x == b.x0.x && a.x0.y == b.x0.y && a.t0 == b.t0 && a.xi0.x == b.xi0.x &&
           a.xi0.y == b.xi0.y;
}

double weighted_sum(const std::vector<double>& s, const TimeWindow& w)
{
    double t = 0.0;
    for (int j = 0; j < w.n_t(); ++j) t += w.weight(j) * s[j];
    return t;
}

} // namespace

Field synthesize_sequence(const std::vector<Field>& profiles,
                          const std::vector<std::vector<SymmetryParams>>& param_seqs, double noise_amp,
                          int n_index, std::uint64_t rng_seed)
{
    require(profiles.size() == param_seqs.size(), "synthesize_sequence: profile/parameter count mismatch");
    require(noise_amp >= 0.0, "synthesize_sequence: noise amplitude must be >= 0");
    for (const auto& seq : param_seqs)
        require(n_index >= 0 && n_index < static_cast<int>(seq.size()), "synthesize_sequence: index out of range");
    for (std::size_t a = 0; a < param_seqs.size(); ++a)
        for (std::size_t b = a + 1; b < param_seqs.size(); ++b)
            if (same_params(param_seqs[a][n_index], param_seqs[b][n_index]))
                throw ValidationError("synthesize_sequence: parameter collision between profiles");
    if (profiles.empty() && noise_amp == 0.0)
        throw ValidationError("synthesize_sequence: no profiles and no noise");
    const Grid2D g = profiles.empty() ? Grid2D(128, 16.0) : profiles.front().grid();
    Field u(g);
    for (std::size_t j = 0; j < profiles.size(); ++j) u += apply_symmetry(profiles[j], param_seqs[j][n_index]);
    if (noise_amp > 0.0) {
        Field noise = random_band_limited(g, 0.5 * kGuardRadius * g.nyquist(), rng_seed);
        u += cplx(noise_amp, 0.0) * noise;
    }
    return u;
}

OrthogonalityDefect orthogonality_defect(const Field& u_n, const DecompositionResult& result, int index,
                                         const TimeWindow& w)
{
    require(result.profiles.size() == result.params.size(), "orthogonality_defect: profile/parameter count mismatch");
    OrthogonalityDefect d;
    Field rem = u_n;
    Field sum(u_n.grid());
    double l2 = u_n.norm() * u_n.norm();
    double six_sum = 0.0;
    for (std::size_t j = 0; j < result.profiles.size(); ++j) {
        require(index >= 0 && index < static_cast<int>(result.params[j].size()),
                "orthogonality_defect: index out of range");
        const Field tj = apply_symmetry(result.profiles[j], result.params[j][index]);
        rem -= tj;
        sum += tj;
        l2 -= result.profiles[j].norm() * result.profiles[j].norm();
        six_sum += weighted_sum(slice_integrals(tj, 6.0, 0.0, w), w);
    }
    l2 -= rem.norm() * rem.norm();
    d.l2_defect = std::abs(l2);
    if (!result.profiles.empty()) {
        const double six_total = weighted_sum(slice_integrals(sum, 6.0, 0.0, w), w);
        d.strichartz_defect = std::abs(six_total - six_sum);
        d.strichartz_relative = six_sum > 0.0 ? d.strichartz_defect / six_sum : 0.0;
    }
    const double un2 = u_n.norm() * u_n.norm();
    d.flagged = d.l2_defect > 0.1 * un2 || d.strichartz_relative > 0.1;
    return d;
}

namespace {

struct Candidate {
    double score = -1.0;
    SymmetryParams p;
};

// max_x |<T_x B, r>| over grid translations, via the spectral cross-correlation
Candidate best_translation(const SpectralField& B, const SpectralField& R, double h, double t0)
{
    const Grid2D& g = B.grid();
    SpectralField prod(g);
    for (std::size_t p = 0; p < prod.coeffs().size(); ++p) prod.coeffs()[p] = std::conj(B.coeffs()[p]) * R.coeffs()[p];
    const Field c = dft_inverse(prod);
    const int n = g.n();
    Candidate best;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            const double a = std::abs(c(i1, i2));
            if (a > best.score) {
                best.score = a;
                best.p.x0 = {g.x(i1), g.x(i2)};
            }
        }
    best.p.h = h;
    best.p.t0 = t0;
    return best;
}

struct StageResult {
    bool found = false;
    SymmetryParams p;
    cplx coeff;
    double scale_norm = 1.0;  // ||T_p D||
};

StageResult greedy_stage(const Field& r, const Field& dict, const std::vector<double>& scales, const TimeWindow& w,
                         const ExtractionOptions& opt)
{
    const SpectralField R = dft_forward(r);
    Candidate best;
    std::vector<std::pair<double, SpectralField>> bases;
    for (double h : scales) {
        try {
            const Field s = rescale(dict, h);
            if (frame_mass(s) > kFrameTolerance) continue;
            SpectralField S = dft_forward(s);
            nyquist_guard(S, "extract_profiles");
            bases.emplace_back(h, std::move(S));
        } catch (const Error&) {
            continue;
        }
    }
    if (bases.empty()) return {};
    auto score_at = [&](std::size_t b, double t0) {
        // e^{-i t0 Delta^2} of the scaled dictionary
        SpectralField B = evolve_spectral(bases[b].second, -t0, Dispersion::quartic);
        return best_translation(B, R, bases[b].first, t0);
    };
    const int nt = std::max(1, opt.t_coarse);
    const double dt = nt > 1 ? 2.0 * w.t_max() / (nt - 1) : 0.0;
    std::size_t best_b = 0;
    for (std::size_t b = 0; b < bases.size(); ++b)
        for (int k = 0; k < nt; ++k) {
            const double t0 = nt > 1 ? -w.t_max() + k * dt : 0.0;
            Candidate c = score_at(b, t0);
            if (c.score > best.score) {
                best = c;
                best_b = b;
            }
        }
    if (nt > 1) {
        // golden-section refinement of t0 around the coarse optimum
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = best.p.t0 - dt, c = best.p.t0 + dt;
        double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
        Candidate f1 = score_at(best_b, x1), f2 = score_at(best_b, x2);
        for (int it = 0; it < 30; ++it) {
            if (f1.score > f2.score) {
                c = x2;
                x2 = x1;
                f2 = f1;
                x1 = c - phi * (c - a);
                f1 = score_at(best_b, x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (c - a);
                f2 = score_at(best_b, x2);
            }
        }
        const Candidate& g = f1.score > f2.score ? f1 : f2;
        if (g.score > best.score) best = g;
    }
    StageResult st;
    st.p = best.p;
    Field v = dict;
    try {
        v = apply_symmetry(dict, st.p);
    } catch (const Error&) {
        return {};
    }
    st.scale_norm = v.norm();
    v *= cplx(1.0 / st.scale_norm, 0.0);
    st.coeff = inner_product(v, r);
    st.found = true;
    return st;
}

} // namespace

DecompositionResult extract_profiles(const std::vector<Field>& u_seq, const Field& dictionary, int max_profiles,
                                     const TimeWindow& w, const ExtractionOptions& opt)
{
    require(!u_seq.empty(), "extract_profiles: empty input sequence");
    require(max_profiles >= 1, "extract_profiles: max_profiles must be >= 1");
    require(std::abs(dictionary.norm() - 1.0) < 1e-8, "extract_profiles: dictionary must be normalized");
    std::vector<double> scales = opt.scales;
    if (scales.empty()) scales = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

    struct Run {
        std::vector<SymmetryParams> params;
        std::vector<cplx> coeffs;
        std::vector<double> norms;
        Field remainder;
    };
    std::vector<Run> runs;
    for (const Field& u : u_seq) {
        require(u.grid() == dictionary.grid(), "extract_profiles: grid mismatch");
        Run run{{}, {}, {}, u};
        for (int j = 0; j < max_profiles; ++j) {
            const StageResult st = greedy_stage(run.remainder, dictionary, scales, w, opt);
            if (!st.found || std::abs(st.coeff) < opt.stop_fraction * run.remainder.norm()) break;
            Field v = apply_symmetry(dictionary, st.p);
            v *= cplx(1.0 / st.scale_norm, 0.0);
            run.remainder -= st.coeff * v;
            run.params.push_back(st.p);
            run.coeffs.push_back(st.coeff);
            run.norms.push_back(st.scale_norm);
        }
        runs.push_back(std::move(run));
    }
    std::size_t count = runs.front().params.size();
    for (const Run& r : runs) count = std::min(count, r.params.size());

    const Run& last = runs.back();
    DecompositionResult res{{}, {}, {}, last.remainder, 0.0, 0.0};
    for (std::size_t j = 0; j < count; ++j) {
        Field phi = dictionary;
        phi *= last.coeffs[j] / last.norms[j];
        res.profiles.push_back(std::move(phi));
        res.energies.push_back(std::norm(last.coeffs[j]));
        std::vector<SymmetryParams> seq;
        for (const Run& r : runs) seq.push_back(r.params[j]);
        res.params.push_back(std::move(seq));
    }
    if (count < last.params.size()) {
        // stages dropped by truncation go back into the remainder
        res.remainder = u_seq.back();
        for (std::size_t j = 0; j < count; ++j) res.remainder -= apply_symmetry(res.profiles[j], res.params[j].back());
    }
    const OrthogonalityDefect d =
        orthogonality_defect(u_seq.back(), res, static_cast<int>(u_seq.size()) - 1, w);
    res.l2_defect = d.l2_defect;
    res.strichartz_defect = d.strichartz_defect;
    return res;
}

} // namespace qs4

namespace qs4 {

void ProfileDemoConfig::validate() const
{
    require(t_max > 0.0 && n_t >= 3 && n_t % 2 == 1, "profile demo: invalid time window");
    require(index >= 1 && index <= 20, "profile demo: index must lie in [1, 20]");
    require(compare_index >= 0 && compare_index <= index, "profile demo: compare index must lie in [0, index]");
    require(noise >= 0.0 && std::isfinite(noise), "profile demo: noise must be >= 0");
    require(max_profiles >= 1, "profile demo: max_profiles must be >= 1");
    const Grid2D g(grid_n, extent);
    require(std::ldexp(1.0, index - 1) * g.spacing() + 5.0 * width < 0.375 * extent,
            "profile demo: profiles leave the safe region at this index");
}

std::vector<std::vector<SymmetryParams>> demo_parameter_sequences(const ProfileDemoConfig& cfg)
{
    const double dx = cfg.extent / cfg.grid_n;
    std::vector<std::vector<SymmetryParams>> seqs(2);
    for (int n = 0; n <= cfg.index; ++n) {
        const double off = std::ldexp(1.0, n - 1) * dx;
        SymmetryParams a, b;
        a.x0 = {-off, 0.0};
        b.x0 = {off, 0.0};
        seqs[0].push_back(a);
        seqs[1].push_back(b);
    }
    return seqs;
}

ProfileDemoReport profile_demo(const ProfileDemoConfig& cfg)
{
    cfg.validate();
    const Grid2D g(cfg.grid_n, cfg.extent);
    const TimeWindow w(cfg.t_max, cfg.n_t);
    const Field dict = make_gaussian(g, {0.0, 0.0}, cfg.width, {0.0, 0.0});
    const std::vector<Field> profiles{dict, dict};
    const auto seqs = demo_parameter_sequences(cfg);

    auto planted_defect = [&](int n) {
        const Field u = synthesize_sequence(profiles, seqs, cfg.noise, n, cfg.seed);
        DecompositionResult planted{profiles, seqs, {}, u, 0.0, 0.0};
        return orthogonality_defect(u, planted, n, w);
    };
    ProfileDemoReport rep;
    rep.planted = planted_defect(cfg.index);
    rep.planted_compare = planted_defect(cfg.compare_index);

    const Field u = synthesize_sequence(profiles, seqs, cfg.noise, cfg.index, cfg.seed);
    const DecompositionResult ex = extract_profiles({u}, dict, cfg.max_profiles, w);
    rep.recovered = static_cast<int>(ex.profiles.size());
    rep.energies = ex.energies;
    std::vector<Field> found;
    for (int k = 0; k < rep.recovered; ++k) {
        rep.recovered_params.push_back(ex.params[k].back());
        found.push_back(apply_symmetry(ex.profiles[k], ex.params[k].back()));
    }
    for (std::size_t j = 0; j < profiles.size(); ++j) {
        const Field planted = apply_symmetry(profiles[j], seqs[j][cfg.index]);
        double best = 1.0;  // nothing recovered counts as 100% error
        for (const Field& f : found) best = std::min(best, l2_norm(f - planted) / planted.norm());
        rep.profile_errors.push_back(best);
    }
    return rep;
}

} // namespace qs4
