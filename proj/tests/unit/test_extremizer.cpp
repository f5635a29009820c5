#include "qs4/error.hpp"
#include "qs4/extremizer.hpp"

#include <doctest.h>

#include <cmath>

using namespace qs4;

namespace {

IterationConfig small_config(int iters)
{
    IterationConfig c;
    c.grid_n = 128;
    c.extent = 16.0;
    c.max_iters = iters;
    c.window = TimeWindow(2.0, 129);
    return c;
}

} // namespace

TEST_CASE("config validation")
{
    IterationConfig c = small_config(3);
    c.max_iters = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(3);
    c.beta = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(3);
    c.tol_residual = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(3);
    c.seed_spec.width = 0.1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(3);
    c.seed_field = Field(Grid2D(64, 16.0));
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("short run ascends and is deterministic")
{
    const IterationConfig c = small_config(6);
    const ExtremizerReport a = run_iteration(c);
    REQUIRE(a.quotient_history.size() >= 2);
    for (std::size_t k = 1; k < a.quotient_history.size(); ++k)
        CHECK(a.quotient_history[k] >= a.quotient_history[k - 1] - c.tol_quotient_delta);
    CHECK(a.omega > 0.0);
    CHECK(std::pow(a.omega, 1.0 / 6.0) == doctest::Approx(a.quotient_history.back()).epsilon(1e-12));
    REQUIRE(a.final_field);
    CHECK(a.final_field->norm() == doctest::Approx(1.0).epsilon(1e-12));

    // first entry is the quotient of the seed, evaluated independently
    NormOptions opt;
    opt.tail_tolerance = 1.0;
    const Field seed = make_gaussian(Grid2D(128, 16.0), {0.0, 0.0}, 1.0, {0.0, 0.0});
    CHECK(a.quotient_history.front() ==
          doctest::Approx(strichartz_quotient(seed, c.window, opt).quotient).epsilon(1e-10));

    const ExtremizerReport b = run_iteration(c);
    CHECK(a.quotient_history == b.quotient_history);
    CHECK(a.final_field->values() == b.final_field->values());
}

TEST_CASE("residual history matches the Euler-Lagrange defect")
{
    const IterationConfig c = small_config(2);
    const ExtremizerReport r = run_iteration(c);
    REQUIRE(r.final_field);
    const Field lam = el_map(*r.final_field, c.window);
    const double omega = inner_product(*r.final_field, lam).real();
    const double res = l2_norm(lam - cplx(omega, 0.0) * *r.final_field) / lam.norm();
    CHECK(r.residual == doctest::Approx(res).epsilon(1e-10));
    CHECK(r.omega == doctest::Approx(omega).epsilon(1e-12));
}

TEST_CASE("recenter")
{
    const Grid2D g(128, 16.0);
    const TimeWindow w(2.0, 129);
    // centered unit Gaussian: second moment already 1
    const RecenterResult id = recenter(make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0}));
    CHECK(id.params.h == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(id.params.x0.x) <= 1e-12);
    CHECK(std::abs(id.params.x0.y) <= 1e-12);
    CHECK(std::abs(id.phase) <= 1e-12);

    Field shifted = make_gaussian(g, {0.5, 0.0}, 1.0, {0.0, 0.0});
    shifted *= std::polar(1.0, 0.8);
    const RecenterResult r = recenter(shifted);
    CHECK(std::abs(r.params.x0.x - 0.5) <= g.spacing());
    CHECK(std::abs(r.params.x0.y) <= g.spacing());
    CHECK(r.phase == doctest::Approx(0.8).epsilon(1e-10));
    // translation and phase only (h = 1): the quotient is unchanged
    const double q0 = strichartz_quotient(shifted, w).quotient;
    CHECK(strichartz_quotient(r.field, w).quotient == doctest::Approx(q0).epsilon(1e-6));
    const SpectralField F = dft_forward(r.field);
    CHECK(std::abs(F(g.n() / 2, g.n() / 2).imag()) <= 1e-12);
    CHECK(F(g.n() / 2, g.n() / 2).real() > 0.0);

    // idempotence on a random field; it is localized so that rescaling does
    // not push mass through the box boundary
    Field noise = random_band_limited(g, 1.5, 5);
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j)
            noise(i, j) *= std::exp(-(std::pow(g.x(i) - 0.7, 2) + std::pow(g.x(j) + 0.4, 2)) / 2.0);
    const Field rnd = normalized(noise);
    REQUIRE(frame_mass(rnd) < kFrameTolerance);
    const RecenterResult once = recenter(rnd);
    const RecenterResult twice = recenter(once.field);
    CHECK(twice.params.h == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(twice.params.x0.x) <= 1e-6);
    CHECK(std::abs(twice.params.x0.y) <= 1e-6);
    CHECK(std::abs(twice.phase) <= 1e-10);

    CHECK_THROWS_AS(recenter(Field(g)), ValidationError);
}

TEST_CASE("diagnostics")
{
    const TimeWindow w(2.0, 129);
    const DiagnosticsSummary empty = diagnostics(ExtremizerReport{}, w);
    CHECK(empty.discrepancy_flag);

    const ExtremizerReport r = run_iteration(small_config(3));
    const DiagnosticsSummary d = diagnostics(r, w, 3);
    CHECK_FALSE(d.converged_flag);
    CHECK(d.pairing_errors.size() == 10);
    // Cauchy-Schwarz: each pairing error is bounded by the residual
    for (double e : d.pairing_errors) CHECK(e <= d.residual * (1.0 + 1e-9));
    CHECK(d.quotient_discrepancy < 1e-2);
    CHECK_FALSE(d.discrepancy_flag);
}
