#include "qs4/bilinear.hpp"

#include "qs4/error.hpp"
#include "qs4/parallel.hpp"
#include "qs4/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qs4 {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Field localized_noise(const Grid2D& g, std::uint64_t seed, double envelope)
{
    Field r = random_field(g, seed);
    if (envelope > 0.0) {
        const int n = g.n();
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const double r2 = g.x(i1) * g.x(i1) + g.x(i2) * g.x(i2);
                r(i1, i2) *= std::exp(-r2 / (2.0 * envelope * envelope));
            }
    }
    return r;
}

void validate_pair(const Grid2D& g, double s, double N)
{
    require(std::isfinite(s) && std::isfinite(N), "pair parameters must be finite");
    require(s >= 2.0 * g.dk(), "low-frequency radius s must be at least two lattice spacings");
    require(N > 1.0, "separation N must exceed 1");
    if (2.0 * N * s >= kGuardRadius * g.nyquist()) {
        std::ostringstream os;
        os << "annulus outer radius 2Ns = " << 2.0 * N * s << " exceeds the Nyquist guard radius "
           << kGuardRadius * g.nyquist();
        throw ValidationError(os.str());
    }
}

double spectral_radius(const SpectralField& F)
{
    const Grid2D& g = F.grid();
    double mx = 0.0;
    for (const cplx& z : F.coeffs()) mx = std::max(mx, std::abs(z));
    double r = 0.0;
    const int n = g.n();
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2)
            if (std::abs(F(p1, p2)) > 1e-13 * mx) r = std::max(r, std::hypot(g.xi(p1), g.xi(p2)));
    return r;
}

} // namespace

SeparatedPair make_separated_pair(const Grid2D& grid, double s, double N, std::uint64_t seed, double envelope)
{
    validate_pair(grid, s, N);
    SeparatedPair pair{Field(grid), Field(grid), s, N};
    Field f = spectral_cutoff(localized_noise(grid, mix_seed(seed, 1), envelope), 0.0, s);
    Field g = spectral_cutoff(localized_noise(grid, mix_seed(seed, 2), envelope), N * s, 2.0 * N * s);
    if (!(f.norm() > 0.0)) throw ValidationError("low-frequency disk contains no lattice points");
    if (!(g.norm() > 0.0)) throw ValidationError("empty annulus");
    pair.f = normalized(std::move(f));
    pair.g = normalized(std::move(g));
    return pair;
}

double support_leak(const SeparatedPair& pair)
{
    auto leak = [](const Field& u, double lo, double hi) {
        const SpectralField F = dft_forward(u);
        const Grid2D& g = u.grid();
        double out = 0.0, tot = 0.0;
        for (int p1 = 0; p1 < g.n(); ++p1)
            for (int p2 = 0; p2 < g.n(); ++p2) {
                const double m = std::norm(F(p1, p2));
                const double r = std::hypot(g.xi(p1), g.xi(p2));
                tot += m;
                if (r < lo || r > hi) out += m;
            }
        return tot > 0.0 ? out / tot : 0.0;
    };
    return leak(pair.f, 0.0, pair.s) + leak(pair.g, pair.N * pair.s, 2.0 * pair.N * pair.s);
}

double product_norm_l3(const Field& f, const Field& g, const TimeWindow& w, double tail_tolerance)
{
    require(f.grid() == g.grid(), "product_norm_l3: grid mismatch");
    const Grid2D& grid = f.grid();
    const SpectralField F = dft_forward(f);
    const SpectralField G = dft_forward(g);
    nyquist_guard(F, "product_norm_l3");
    nyquist_guard(G, "product_norm_l3");
    if (f.norm() == 0.0 || g.norm() == 0.0) return 0.0;
    // the product of the two evolutions is band-limited to rF + rG
    const int pad = spectral_radius(F) + spectral_radius(G) < grid.nyquist() ? 1 : 2;
    const PaddedBasis basis(grid, pad);
    const std::vector<double> sym = dispersion_symbol(grid, Dispersion::quartic);
    const std::size_t nn = grid.size();
    std::vector<double> slices(w.n_t());
    visit_nodes(w, 0, w.n_t(), 0, node_chunks(w.n_t()), sym, [&](int, int j, const std::vector<cplx>& phase) {
        thread_local std::vector<cplx> coeffs, uf, ug;
        coeffs.resize(nn);
        for (std::size_t p = 0; p < nn; ++p) coeffs[p] = F.coeffs()[p] * phase[p];
        basis.to_physical(coeffs.data(), uf);
        for (std::size_t p = 0; p < nn; ++p) coeffs[p] = G.coeffs()[p] * phase[p];
        basis.to_physical(coeffs.data(), ug);
        double s = 0.0;
        for (std::size_t i = 0; i < uf.size(); ++i) {
            const double m2 = std::norm(uf[i] * ug[i]);
            s += m2 * std::sqrt(m2);
        }
        slices[j] = s * basis.cell();
    });
    double total = 0.0;
    for (int j = 0; j < w.n_t(); ++j) total += w.weight(j) * slices[j];
    if (total == 0.0) return 0.0;
    const double tail = tail_fraction(slices, w);
    if (tail >= tail_tolerance) {
        std::ostringstream os;
        os << "tail test failed: endpoint slices carry " << tail << " of the L3 product integral";
        throw NumericalGuardError(os.str());
    }
    return std::cbrt(total);
}

double product_norm_l3(const SeparatedPair& pair, const TimeWindow& w, double tail_tolerance)
{
    return product_norm_l3(pair.f, pair.g, w, tail_tolerance);
}

void validate_decay_scan(const Grid2D& grid, double s, const std::vector<double>& N_list,
                         const std::vector<std::uint64_t>& seeds)
{
    require(N_list.size() >= 4, "decay scan needs at least 4 values of N");
    require(!seeds.empty(), "decay scan needs at least one seed");
    const double ratio = N_list[1] / N_list[0];
    require(ratio > 1.0, "N list must be increasing");
    for (std::size_t i = 1; i < N_list.size(); ++i)
        require(std::abs(N_list[i] / N_list[i - 1] - ratio) <= 1e-9 * ratio, "N list must be geometric");
    for (double N : N_list) validate_pair(grid, s, N);
}

TimeWindow scan_window(const TimeWindow& w, double N0, double N)
{
    return TimeWindow(w.t_max() * std::pow(N0 / N, 3), w.n_t());
}

BilinearScan decay_scan(const Grid2D& grid, double s, const std::vector<double>& N_list,
                        const std::vector<std::uint64_t>& seeds, const TimeWindow& w, double envelope)
{
    validate_decay_scan(grid, s, N_list, seeds);
    BilinearScan scan;
    scan.N = N_list;
    for (double N : N_list) {
        const TimeWindow wn = scan_window(w, N_list.front(), N);
        std::vector<double> vals;
        for (std::uint64_t seed : seeds) vals.push_back(product_norm_l3(make_separated_pair(grid, s, N, seed, envelope), wn));
        scan.medians.push_back(median(vals));
        scan.values.push_back(std::move(vals));
    }
    scan.fit = fit_loglog(scan.N, scan.medians);
    scan.reliable = scan.fit.rms_residual <= 0.1;
    for (std::size_t i = 0; i < scan.N.size(); ++i)
        scan.weak_constant = std::max(scan.weak_constant, scan.medians[i] * std::cbrt(scan.N[i]));
    return scan;
}

double jacobian_det(Vec2 xi, Vec2 eta)
{
    return 4.0 * std::abs(eta.x * norm2(eta) - xi.x * norm2(xi));
}

double jacobian_det_numeric(Vec2 xi, Vec2 eta)
{
    const double a = norm2(xi), b = norm2(eta);
    std::array<std::array<double, 4>, 4> m{{{1.0, 0.0, 1.0, 0.0},
                                            {0.0, 1.0, 0.0, 1.0},
                                            {4.0 * xi.x * a, 4.0 * xi.y * a, 4.0 * eta.x * b, 4.0 * eta.y * b},
                                            {0.0, 1.0, 0.0, 0.0}}};
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < 4; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return std::abs(det);
}

} // namespace qs4
