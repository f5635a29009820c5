#include "qs4/weights.hpp"

#include "qs4/error.hpp"
#include "qs4/fit.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qs4 {

WeightParams WeightParams::coupled_to(double s, double eps)
{
    WeightParams p;
    p.s = s;
    p.eps = eps;
    p.mu = std::pow(s, -8.0);
    p.coupled = true;
    p.validate();
    return p;
}

void WeightParams::validate() const
{
    require(mu >= 0.0 && std::isfinite(mu), "weight mu must be >= 0");
    require(eps >= 0.0 && std::isfinite(eps), "weight eps must be >= 0");
    require(s > 0.0 && std::isfinite(s), "weight cutoff scale s must be > 0");
    if (coupled) require(mu == std::pow(s, -8.0), "coupled weight requires mu = s^-8");
}

double weight_f(Vec2 eta, const WeightParams& p)
{
    const double r2 = norm2(eta);
    const double q = r2 * r2;
    return p.mu * q / (1.0 + p.eps * q);
}

Vec2 constraint_a(const ConstraintTuple& t) { return t[0] + t[1] + t[2] - t[3] - t[4] - t[5]; }

double constraint_b(const ConstraintTuple& t)
{
    double b = 0.0;
    for (int k = 0; k < 6; ++k) {
        const double r2 = norm2(t[k]);
        b += (k < 3 ? 1.0 : -1.0) * r2 * r2;
    }
    return b;
}

double quartic_mass(const ConstraintTuple& t)
{
    double s = 0.0;
    for (const Vec2& v : t) s += norm2(v) * norm2(v);
    return s;
}

std::vector<ConstraintTuple> sample_constraint_tuples(int count, double radius, std::uint64_t rng_seed)
{
    require(count >= 1, "sample count must be >= 1");
    require(radius > 0.0 && std::isfinite(radius), "sample radius must be positive");
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto disk = [&] {
        const double r = radius * std::sqrt(uni(rng));
        const double a = 2.0 * std::numbers::pi * uni(rng);
        return Vec2{r * std::cos(a), r * std::sin(a)};
    };
    auto q4 = [](Vec2 v) { return norm2(v) * norm2(v); };
    std::vector<ConstraintTuple> out;
    out.reserve(count);
    const long long max_attempts = 100LL * count;
    long long attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (attempts >= max_attempts)
            throw ValidationError("sample_constraint_tuples: rejection rate above 99%");
        ++attempts;
        ConstraintTuple t;
        for (int k = 1; k < 6; ++k) t[k] = disk();
        const double D = q4(t[3]) + q4(t[4]) + q4(t[5]) - q4(t[1]) - q4(t[2]);
        const double a = 2.0 * std::numbers::pi * uni(rng);
        if (D < 0.0) continue;
        const double r = std::pow(D, 0.25);
        t[0] = {r * std::cos(a), r * std::sin(a)};
        out.push_back(t);
    }
    return out;
}

KernelReport weight_kernel_check(const std::vector<ConstraintTuple>& tuples, const WeightParams& p)
{
    p.validate();
    KernelReport rep;
    rep.tuples = tuples.size();
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const ConstraintTuple& t = tuples[i];
        double rest = 0.0;
        for (int k = 1; k < 6; ++k) rest += weight_f(t[k], p);
        const double kern = std::exp(weight_f(t[0], p) - rest);
        if (kern > 1.0 + kKernelTolerance) ++rep.violations;
        if (i == 0 || kern > rep.max_kernel) {
            rep.max_kernel = kern;
            rep.argmax = i;
            rep.argmax_tuple = t;
        }
    }
    return rep;
}

DecayFit decay_fit(const SpectralField& F, double r_min, double threshold)
{
    const Grid2D& g = F.grid();
    require(r_min >= 0.0, "decay_fit: r_min must be >= 0");
    const double r_max = 0.8 * g.nyquist();
    require(r_min < r_max, "decay_fit: r_min must lie below 0.8 Nyquist");
    const double dk = g.dk();
    const int nshell = static_cast<int>(std::floor((r_max - r_min) / dk)) + 1;
    std::vector<double> best(nshell, 0.0), at(nshell, 0.0);
    double global = 0.0;
    const int n = g.n();
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
            const double a = std::abs(F(p1, p2));
            global = std::max(global, a);
            const double r = std::hypot(g.xi(p1), g.xi(p2));
            if (r < r_min || r > r_max) continue;
            const int s = std::min(nshell - 1, static_cast<int>((r - r_min) / dk));
            if (a > best[s]) {
                best[s] = a;
                at[s] = r;
            }
        }
    require(global > 0.0, "decay_fit: zero spectrum");
    std::vector<double> x, y;
    int occupied = 0;
    for (int s = 0; s < nshell; ++s) {
        if (at[s] == 0.0 && best[s] == 0.0) continue;
        ++occupied;
        if (best[s] <= kDecayFloor * global) continue;
        x.push_back(std::pow(at[s], 4));
        y.push_back(std::log(best[s]));
    }
    if (occupied > 0 && x.empty()) throw NumericalGuardError("decay_fit: all shell moduli at the noise floor");
    if (x.size() < 6) throw ValidationError("decay_fit: fewer than 6 usable shells");
    const LineFit lf = fit_line(x, y);
    DecayFit d;
    d.mu = -lf.slope;
    d.intercept = lf.intercept;
    d.rms_residual = lf.rms_residual;
    d.r_squared = lf.r_squared;
    d.shells = static_cast<int>(x.size());
    d.quartic = lf.rms_residual <= threshold;
    return d;
}

} // namespace qs4
