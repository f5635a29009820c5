#include "qs4/bilinear.hpp"
#include "qs4/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace qs4;

namespace {

// smallest and largest |xi| carrying nonzero lattice mass
std::pair<double, double> spectral_extent(const Field& f)
{
    const SpectralField F = dft_forward(f);
    const Grid2D& g = f.grid();
    double lo = kInfinity, hi = 0.0;
    for (int p1 = 0; p1 < g.n(); ++p1)
        for (int p2 = 0; p2 < g.n(); ++p2)
            if (std::abs(F(p1, p2)) > 1e-12 * F.norm()) {
                const double r = std::hypot(g.xi(p1), g.xi(p2));
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
    return {lo, hi};
}

} // namespace

TEST_CASE("separated pair construction")
{
    const Grid2D g(256, 32.0);
    const SeparatedPair p = make_separated_pair(g, 2.0, 4.0, 11);
    CHECK(p.f.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.g.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(support_leak(p) <= 1e-28);
    const auto [flo, fhi] = spectral_extent(p.f);
    const auto [glo, ghi] = spectral_extent(p.g);
    CHECK(fhi <= 2.0);
    CHECK(glo >= 8.0);
    CHECK(ghi < 16.0);
    CHECK(glo / fhi >= 4.0);
    (void)flo;

    const SeparatedPair q = make_separated_pair(g, 2.0, 4.0, 11);
    CHECK(q.f.values() == p.f.values());
    CHECK(q.g.values() == p.g.values());
    const SeparatedPair r = make_separated_pair(g, 2.0, 4.0, 12);
    CHECK(r.f.values() != p.f.values());

    // the envelope localizes before filtering; supports stay clean
    const SeparatedPair e = make_separated_pair(g, 2.0, 4.0, 11, 2.0);
    CHECK(support_leak(e) <= 1e-28);

    CHECK_THROWS_AS(make_separated_pair(g, 2.0, 20.0, 1), ValidationError);
    CHECK_THROWS_AS(make_separated_pair(g, 0.1, 4.0, 1), ValidationError);
}

TEST_CASE("L3 product norm")
{
    const Grid2D g(128, 32.0);
    const Field f = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});
    const TimeWindow w(1.5, 257);
    // Holder equality case |u u|_3 = |u|_6^2
    const double uu = product_norm_l3(f, f, w);
    const double u6 = spacetime_norm(f, 6.0, 0.0, w);
    CHECK(uu == doctest::Approx(u6 * u6).epsilon(1e-10));

    // zero partner
    CHECK(product_norm_l3(f, Field(g), w, 1.0) == 0.0);

    // time refinement
    const SeparatedPair p = make_separated_pair(g, 1.0, 4.0, 3, 2.0);
    const TimeWindow wp(0.02, 129);
    const double a = product_norm_l3(p, wp);
    const double b = product_norm_l3(p, TimeWindow(0.02, 257));
    CHECK(std::abs(b / a - 1.0) < 5e-3);
}

TEST_CASE("decay scan contract")
{
    const Grid2D g(128, 32.0);
    const std::vector<double> N{1.5, 2.25, 3.375, 5.0625};
    CHECK_NOTHROW(validate_decay_scan(g, 1.0, N, {1, 2, 3}));
    CHECK_THROWS_AS(validate_decay_scan(g, 1.0, {2.0, 4.0}, {1}), ValidationError);
    CHECK_THROWS_AS(validate_decay_scan(g, 1.0, {2.0, 4.0, 8.0, 16.0}, {1}), ValidationError);
    CHECK_THROWS_AS(validate_decay_scan(g, 1.0, N, {}), ValidationError);

    const TimeWindow w0(0.2, 129);
    CHECK(scan_window(w0, 1.5, 3.0).t_max() == doctest::Approx(0.2 / 8.0).epsilon(1e-15));
    CHECK(scan_window(w0, 1.5, 3.0).n_t() == 129);

    const BilinearScan a = decay_scan(g, 1.0, N, {1, 2, 3}, w0, 2.0);
    const BilinearScan b = decay_scan(g, 1.0, N, {3, 1, 2}, w0, 2.0);
    CHECK(a.medians == b.medians);
    REQUIRE(a.values.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.values[i].size() == 3);
        CHECK(a.medians[i] == median(a.values[i]));
    }
    CHECK(a.fit.points == 4);
    CHECK(a.fit.slope <= -1.0 / 3.0 + 0.05);
    CHECK(a.reliable == (a.fit.rms_residual <= 0.1));
    CHECK(a.sharp_reference == doctest::Approx(-5.0 / 6.0));
    CHECK(a.weak_reference == doctest::Approx(-1.0 / 3.0));
    double c = 0.0;
    for (std::size_t i = 0; i < 4; ++i) c = std::max(c, a.medians[i] * std::cbrt(N[i]));
    CHECK(a.weak_constant == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("Jacobian closed form")
{
    CHECK(jacobian_det({1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(28.0).epsilon(1e-15));
    CHECK(jacobian_det_numeric({1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(28.0).epsilon(1e-14));
    CHECK(jacobian_det({0.3, -1.2}, {0.3, -1.2}) == 0.0);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec2 xi{u(rng), u(rng)}, eta{u(rng), u(rng)};
        const double a = jacobian_det(xi, eta), b = jacobian_det_numeric(xi, eta);
        worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("Jacobian lower bound on dyadic annuli")
{
    // |xi| <= s, 2^k Ns <= |eta| <= 2^{k+1} Ns, eta_1 - xi_1 >= Ns
    const double s = 2.0, N = 4.0, Ns = N * s;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double c = kInfinity;
    for (int k = 0; k < 4; ++k) {
        double lo = kInfinity;
        int taken = 0;
        while (taken < 10000) {
            const double rx = s * std::sqrt(u(rng)), ax = 2.0 * std::numbers::pi * u(rng);
            const double re = std::ldexp(Ns, k) * (1.0 + u(rng)), ae = 2.0 * std::numbers::pi * u(rng);
            const Vec2 xi{rx * std::cos(ax), rx * std::sin(ax)}, eta{re * std::cos(ae), re * std::sin(ae)};
            if (eta.x - xi.x < Ns) continue;
            ++taken;
            lo = std::min(lo, jacobian_det(xi, eta));
        }
        c = std::min(c, lo / (std::ldexp(1.0, 2 * k) * Ns * Ns * Ns));
    }
    CHECK(c >= 1.0);
}
