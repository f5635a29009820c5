#include "qs4/error.hpp"
#include "qs4/profiles.hpp"
#include "qs4/propagator.hpp"

#include <doctest.h>

#include <cmath>

using namespace qs4;

namespace {

double rel_err(const Field& a, const Field& b) { return l2_norm(a - b) / l2_norm(b); }

} // namespace

TEST_CASE("symmetry operators")
{
    const Grid2D g(256, 64.0);
    const Field phi = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});

    CHECK(apply_symmetry(phi, {}).values() == phi.values());
    CHECK_THROWS_AS(SymmetryParams{0.0}.validate(), ValidationError);
    CHECK_THROWS_AS(inverse(SymmetryParams{1.0, {}, 0.1, {1.0, 0.0}}), ValidationError);

    // h = 2 doubles the width
    const Field wide = apply_symmetry(phi, {2.0});
    CHECK(wide.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rel_err(wide, make_gaussian(g, {0.0, 0.0}, 2.0, {0.0, 0.0})) <= 1e-10);

    const SymmetryParams ps[] = {
        {2.0, {1.5, -2.0}, 0.05, {0.0, 0.0}},
        {0.5, {-1.0, 0.5}, -0.002, {0.0, 0.0}},
        {1.0, {0.3, 0.2}, 0.0, {2.0, -1.0}},
    };
    for (const SymmetryParams& p : ps) {
        const Field u = apply_symmetry(phi, p);
        CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-6));
        if (p.xi0 == Vec2{}) {
            const Field back = apply_symmetry(apply_symmetry(phi, inverse(p)), p);
            CHECK(rel_err(back, phi) <= 1e-6);
        }
    }

    // time shifts need room: quartic tails travel at 4|xi|^3
    // e^{-i t0 Delta^2} cancels against the forward evolution by t0
    const SymmetryParams p{2.0, {1.0, 1.0}, 0.05, {}};
    const Field cancelled = evolve_quartic(apply_symmetry(phi, p), 0.05);
    CHECK(rel_err(cancelled, apply_symmetry(phi, {2.0, {1.0, 1.0}, 0.0, {}})) <= 1e-12);

    // translation is exact on the lattice band
    const Field shifted = translate(phi, {g.spacing() * 4.0, 0.0});
    CHECK(std::abs(shifted(132, 128) - phi(128, 128)) <= 1e-14);

    // pushing the profile into the frame is rejected
    CHECK_THROWS_AS(apply_symmetry(phi, {1.0, {22.0, 0.0}}), ValidationError);
}

TEST_CASE("scaling covariance of the quotient")
{
    // u_h(t, x) = h^{-1} u(t / h^4, x / h): the window scales by h^4
    const Grid2D g(128, 32.0);
    const Field phi = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});
    const double q1 = strichartz_quotient(phi, TimeWindow(1.5, 257)).quotient;
    const double q2 = strichartz_quotient(apply_symmetry(phi, {2.0}), TimeWindow(24.0, 257)).quotient;
    CHECK(std::abs(q2 / q1 - 1.0) <= 0.01);
}

TEST_CASE("sequence synthesis")
{
    ProfileDemoConfig cfg;
    const Grid2D g(cfg.grid_n, cfg.extent);
    const Field phi = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});
    const auto seqs = demo_parameter_sequences(cfg);
    REQUIRE(seqs.size() == 2);
    REQUIRE(seqs[0].size() == static_cast<std::size_t>(cfg.index + 1));
    // divergent: the separation doubles per index
    const double d5 = length(seqs[0][5].x0 - seqs[1][5].x0), d6 = length(seqs[0][6].x0 - seqs[1][6].x0);
    CHECK(d6 == doctest::Approx(2.0 * d5));

    const Field one = synthesize_sequence({phi}, {seqs[0]}, 0.0, 6, 1);
    CHECK(one.values() == apply_symmetry(phi, seqs[0][6]).values());

    const Field two = synthesize_sequence({phi, phi}, seqs, 0.0, 6, 1);
    CHECK(std::abs(two.norm() * two.norm() - 2.0) <= 1e-3);

    const Field noise = synthesize_sequence({}, {}, 0.2, 0, 4);
    CHECK(noise.norm() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(synthesize_sequence({}, {}, 0.2, 0, 4).values() == noise.values());

    CHECK_THROWS_AS(synthesize_sequence({phi, phi}, {seqs[0], seqs[0]}, 0.0, 6, 1), ValidationError);
    CHECK_THROWS_AS(synthesize_sequence({phi}, {seqs[0]}, 0.0, 99, 1), ValidationError);
    CHECK_THROWS_AS(synthesize_sequence({phi}, {}, 0.0, 0, 1), ValidationError);
}

TEST_CASE("orthogonality defects")
{
    const Grid2D g(128, 64.0);
    const TimeWindow w(0.25, 65);
    const Field phi = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});
    const SymmetryParams p{1.0, {1.0, -1.0}, 0.02, {}};

    DecompositionResult single{{phi}, {{p}}, {}, Field(g), 0.0, 0.0};
    const OrthogonalityDefect d1 = orthogonality_defect(apply_symmetry(phi, p), single, 0, w);
    CHECK(d1.l2_defect <= 1e-10);
    CHECK(d1.strichartz_relative <= 1e-10);
    CHECK_FALSE(d1.flagged);

    // coincident parameters: defects O(1), flagged, no exception
    DecompositionResult twin{{phi, phi}, {{p}, {p}}, {}, Field(g), 0.0, 0.0};
    const Field u = synthesize_sequence({phi}, {{p}}, 0.0, 0, 1);
    const Field u2 = cplx(2.0, 0.0) * u;
    OrthogonalityDefect d2;
    CHECK_NOTHROW(d2 = orthogonality_defect(u2, twin, 0, w));
    CHECK(d2.flagged);
    CHECK(d2.l2_defect > 0.5);

    DecompositionResult bad{{phi}, {}, {}, Field(g), 0.0, 0.0};
    CHECK_THROWS_AS(orthogonality_defect(u, bad, 0, w), ValidationError);

    // shipped scenario: defects shrink with the index
    const ProfileDemoReport rep = profile_demo(ProfileDemoConfig{});
    CHECK(rep.planted.l2_defect <= 1e-3);
    CHECK(rep.planted.strichartz_relative <= 1e-2);
    CHECK(rep.planted.l2_defect < rep.planted_compare.l2_defect);
    CHECK(rep.planted.strichartz_relative < rep.planted_compare.strichartz_relative);
    CHECK(rep.recovered == 2);
    for (double e : rep.profile_errors) CHECK(e < 0.05);
}

TEST_CASE("greedy extraction")
{
    const Grid2D g(128, 64.0);
    const TimeWindow w(0.2, 65);
    const Field dict = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});
    const SymmetryParams planted{2.0, {3.0, -2.0}, 0.05, {}};
    const Field u = apply_symmetry(dict, planted);

    const DecompositionResult r = extract_profiles({u}, dict, 2, w);
    REQUIRE(r.profiles.size() >= 1);
    const SymmetryParams& got = r.params[0].back();
    CHECK(got.h >= 1.0);
    CHECK(got.h <= 4.0);
    CHECK(std::abs(got.x0.x - planted.x0.x) <= g.spacing());
    CHECK(std::abs(got.x0.y - planted.x0.y) <= g.spacing());
    CHECK(std::abs(got.t0 - planted.t0) <= 2.0 * w.t_max() / 8.0);
    CHECK(rel_err(apply_symmetry(r.profiles[0], got), u) < 0.05);

    // Pythagoras: each stage removes exactly its energy
    double removed = 0.0;
    for (double e : r.energies) removed += e;
    const double rn = r.remainder.norm();
    CHECK(std::abs(u.norm() * u.norm() - removed - rn * rn) <= 1e-10);
    for (std::size_t j = 1; j < r.energies.size(); ++j) CHECK(r.energies[j] <= r.energies[j - 1]);

    // noise input: at most one spurious weak profile
    const Field noise = random_band_limited(g, 3.0, 8);
    const DecompositionResult rn2 = extract_profiles({noise}, dict, 3, w);
    CHECK(rn2.profiles.size() <= 1);
    for (double e : rn2.energies) CHECK(e < 0.1 * noise.norm() * noise.norm());

    CHECK_THROWS_AS(extract_profiles({}, dict, 1, w), ValidationError);
    CHECK_THROWS_AS(extract_profiles({u}, dict, 0, w), ValidationError);
    CHECK_THROWS_AS(extract_profiles({u}, cplx(2.0, 0.0) * dict, 1, w), ValidationError);
}

TEST_CASE("two scales are both recovered")
{
    const Grid2D g(256, 128.0);
    const TimeWindow w(0.2, 33);
    const Field dict = make_gaussian(g, {0.0, 0.0}, 1.0, {0.0, 0.0});
    const Field a = apply_symmetry(dict, {1.0, {-30.0, 0.0}});
    const Field b = apply_symmetry(dict, {8.0, {0.0, 0.0}});
    const Field u = a + cplx(0.8, 0.0) * b;
    ExtractionOptions opt;
    opt.t_coarse = 3;
    const DecompositionResult r = extract_profiles({u}, dict, 2, w, opt);
    REQUIRE(r.profiles.size() == 2);
    double e1 = r.energies[0], e2 = r.energies[1];
    // the larger planted energy is extracted first
    CHECK(e1 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(e2 == doctest::Approx(0.64).epsilon(0.05));
    CHECK(r.params[0].back().h == 1.0);
    CHECK(r.params[1].back().h == 8.0);
}
