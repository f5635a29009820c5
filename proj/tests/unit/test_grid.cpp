#include "qs4/error.hpp"
#include "qs4/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qs4;

namespace {

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("grid validation")
{
    CHECK_THROWS_AS(Grid2D(100, 16.0), ValidationError);
    CHECK_THROWS_AS(Grid2D(8, 16.0), ValidationError);
    CHECK_THROWS_AS(Grid2D(64, 0.0), ValidationError);
    CHECK_THROWS_AS(Grid2D(64, -1.0), ValidationError);
    const Grid2D g(64, 16.0);
    CHECK(g.dk() == doctest::Approx(2.0 * std::numbers::pi / 16.0));
    CHECK(g.nyquist() == doctest::Approx(std::numbers::pi * 64 / 16.0));
    CHECK(g.xi(32) == 0.0);
    CHECK(g.x(0) == -8.0);
}

TEST_CASE("field rejects non-finite values and wrong sizes")
{
    const Grid2D g(16, 4.0);
    std::vector<cplx> v(g.size(), 1.0);
    v[3] = {NAN, 0.0};
    CHECK_THROWS_AS(Field(g, v), ValidationError);
    CHECK_THROWS_AS(Field(g, std::vector<cplx>(10)), ValidationError);
}

TEST_CASE("dft round trip and Parseval on random fields")
{
    const Grid2D g(64, 10.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Field f = random_field(g, seed);
        const SpectralField F = dft_forward(f);
        const Field back = dft_inverse(F);
        CHECK(max_abs_diff(back.values(), f.values()) <= 1e-12 * f.norm() * g.n());
        // lattice Parseval: sum |F|^2 dk^2 = (2 pi)^2 ||u||^2
        CHECK(F.norm() == doctest::Approx(2.0 * std::numbers::pi * f.norm()).epsilon(1e-12));
    }
}

TEST_CASE("dft of a Gaussian matches the continuous transform")
{
    // oracle: F(xi) = a 2 pi w^2 exp(-w^2 |xi|^2 / 2), a = 1 / (sqrt(pi) w)
    const double w = 1.3;
    const Grid2D g(128, 32.0);
    const SpectralField F = dft_forward(make_gaussian(g, {0.0, 0.0}, w, {0.0, 0.0}));
    const double a = 1.0 / (std::sqrt(std::numbers::pi) * w);
    for (int p1 : {64, 66, 70, 75})
        for (int p2 : {64, 61, 58}) {
            const double r2 = g.xi(p1) * g.xi(p1) + g.xi(p2) * g.xi(p2);
            const double expect = a * 2.0 * std::numbers::pi * w * w * std::exp(-0.5 * w * w * r2);
            CHECK(std::abs(F(p1, p2) - expect) <= 1e-12);
        }
}

TEST_CASE("make_gaussian: normalization, modulation and preconditions")
{
    const Grid2D g(64, 16.0);
    const Field f = make_gaussian(g, {1.0, -0.5}, 1.0, {0.0, 0.0});
    CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(make_gaussian(g, {0.0, 0.0}, 0.2, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(make_gaussian(g, {0.0, 0.0}, 2.5, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(make_gaussian(g, {0.0, 0.0}, 1.0, {13.0, 0.0}), ValidationError);

    // modulation (10, 0) puts the spectral peak at the lattice point nearest (10, 0)
    const Grid2D h(128, 16.0);
    const SpectralField F = dft_forward(make_gaussian(h, {0.0, 0.0}, 1.0, {10.0, 0.0}));
    int b1 = 0, b2 = 0;
    for (int p1 = 0; p1 < h.n(); ++p1)
        for (int p2 = 0; p2 < h.n(); ++p2)
            if (std::abs(F(p1, p2)) > std::abs(F(b1, b2))) {
                b1 = p1;
                b2 = p2;
            }
    CHECK(std::abs(h.xi(b1) - 10.0) <= 0.5 * h.dk());
    CHECK(h.xi(b2) == 0.0);
}

TEST_CASE("spectral_cutoff keeps exactly the requested band")
{
    const Grid2D g(64, 16.0);
    const Field f = random_field(g, 3);
    const SpectralField F = dft_forward(spectral_cutoff(f, 1.0, 3.0));
    const SpectralField G = dft_forward(f);
    for (int p1 = 0; p1 < g.n(); ++p1)
        for (int p2 = 0; p2 < g.n(); ++p2) {
            const double r = std::hypot(g.xi(p1), g.xi(p2));
            if (r >= 1.0 && r < 3.0) CHECK(std::abs(F(p1, p2) - G(p1, p2)) <= 1e-10);
            else CHECK(std::abs(F(p1, p2)) <= 1e-10);
        }
    CHECK_THROWS_AS(spectral_cutoff(f, 0.0, g.nyquist() * 1.01), ValidationError);
    CHECK_THROWS_AS(spectral_cutoff(f, 2.0, 1.0), ValidationError);
}

TEST_CASE("random fields are deterministic per seed")
{
    const Grid2D g(32, 8.0);
    CHECK(random_field(g, 9).values() == random_field(g, 9).values());
    CHECK(random_field(g, 9).values() != random_field(g, 10).values());
    const Field b = random_band_limited(g, 2.0, 4);
    CHECK(b.norm() == doctest::Approx(1.0));
    CHECK(spectral_mass_above(dft_forward(b), 2.0) <= 1e-20);
}

TEST_CASE("padded basis reproduces the trigonometric interpolant")
{
    const Grid2D g(32, 8.0);
    const Field f = random_band_limited(g, 0.5 * g.nyquist(), 11);
    const SpectralField F = dft_forward(f);
    for (int factor : {1, 2, 3}) {
        const PaddedBasis b(g, factor);
        CHECK(b.m() == factor * g.n());
        std::vector<cplx> phys;
        b.to_physical(F.coeffs().data(), phys);
        // every factor-th sample sits on the original grid
        for (int i1 = 0; i1 < g.n(); ++i1)
            for (int i2 = 0; i2 < g.n(); ++i2)
                CHECK(std::abs(phys[static_cast<std::size_t>(i1 * factor) * b.m() + i2 * factor] - f(i1, i2)) <= 1e-12);
        std::vector<cplx> back(g.size());
        b.to_spectral(phys, back.data());
        CHECK(max_abs_diff(back, F.coeffs()) <= 1e-12);
    }
}

TEST_CASE("inner product, norms and frame mass")
{
    const Grid2D g(64, 16.0);
    const Field a = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});
    CHECK(inner_product(a, a).real() == doctest::Approx(1.0));
    CHECK(l2_norm(a) == doctest::Approx(a.norm()));
    CHECK(frame_mass(a) < kFrameTolerance);
    const Field edge = make_gaussian(g, {7.0, 0.0}, 1.0, {0.0, 0.0});
    CHECK(frame_mass(edge) > 0.1);
    CHECK_THROWS_AS(normalized(Field(g)), ValidationError);
}
