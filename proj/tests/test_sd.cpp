#include <doctest.h>

#include <cmath>

#include "sdiss/errors.hpp"
#include "sdiss/strong_dissipation.hpp"

using namespace sdiss;

namespace {

// largest singular value of the Henon jacobian at abscissa x, from the
// characteristic polynomial of J^T J
double henon_smax(double a, double b, double x) {
    double p = -2 * a * x;
    double tr = p * p + 1 + b * b;
    return std::sqrt((tr + std::sqrt(tr * tr - 4 * b * b)) / 2);
}

}  // namespace

TEST_CASE("dissipation on a linear map") {
    auto S = TrappingRegion::rectangle(-1, 1, -1, 1);
    // conorm 1e-3, det 1e-4: 1e-3^{9/10} - 1e-4
    auto r = check_dissipation2(AffineMap{Mat2::diag(0.1, 0.001), {}}, S, 20);
    CHECK(r.sup_det == doctest::Approx(1e-4));
    CHECK(r.margin == doctest::Approx(std::pow(1e-3, 0.9) - 1e-4).epsilon(1e-9));
    CHECK(r.inf_angles_pow == doctest::Approx(r.inf_conorm_pow).epsilon(1e-9));
    CHECK(r.holds());
    // conorm 1e-2, det 2e-2: fails
    CHECK_FALSE(check_dissipation2(AffineMap{Mat2::diag(0.01, 2.0), {}}, S, 20).holds());
}

TEST_CASE("dissipation on henon regions") {
    for (double b : {0.05, 0.1, 0.2}) {
        auto S = henon_trapping_region(1.4, b);
        auto r = check_dissipation2(HenonMap{1.4, b}, S, 200);
        CHECK(r.sup_det == doctest::Approx(b).epsilon(1e-14));
        // sigma_min = b / sigma_max is smallest where |x| is largest
        auto box = S.box();
        double xm = std::max(std::abs(box.xmin), std::abs(box.xmax));
        double want = std::pow(b / henon_smax(1.4, b, xm), 0.9) - b;
        CHECK(r.margin >= want - 1e-12);
        CHECK(r.margin == doctest::Approx(want).epsilon(0.05));
        // at these parameters the condition fails on the whole region
        CHECK_FALSE(r.holds());
        CHECK(r.inf_angles_pow >= r.inf_conorm_pow * (1 - 1e-9));
    }
}

TEST_CASE("cycles and sink support") {
    PlanarMap f = HenonMap{1.4, 0.1};
    Point2 z = iterate(f, {0.1, 0.0}, 5000).points.back();
    auto sink = periodic_measure(f, z, 2);
    CHECK(measure_cycle(f, sink) == std::optional<std::size_t>(2));
    auto si = sink_support(f, sink);
    REQUIRE(si);
    CHECK(si->period == 2);
    CHECK(si->spectral_radius < 1);

    // the Birkhoff measure settles on the same sink
    auto mu = birkhoff_measure(f, {0.1, 0.0}, 2000, 3000);
    CHECK(measure_cycle(f, mu) == std::optional<std::size_t>(2));

    // chaotic side: no cycle
    PlanarMap g = HenonMap{1.4, -0.1};
    auto chaos = birkhoff_measure(g, {0.1, 0.0}, 2000, 1000);
    CHECK_FALSE(measure_cycle(g, chaos));
    CHECK_FALSE(sink_support(g, chaos));

    // a saddle cycle is a cycle but not a sink
    auto fp = periodic_measure(f, henon_fixed_points(HenonMap{1.4, 0.1}).first, 1);
    CHECK(measure_cycle(f, fp) == std::optional<std::size_t>(1));
    CHECK_FALSE(sink_support(f, fp));
}

TEST_CASE("sample indices") {
    auto k = sample_indices(10, 3);
    REQUIRE(k.size() == 3);
    CHECK(k[0] < k[1]);
    CHECK(k[1] < k[2]);
    CHECK(k[2] < 10);
    CHECK(sample_indices(5, 10) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(sample_indices(0, 4).empty());
}

TEST_CASE("verdict on a sink measure is vacuous") {
    PlanarMap f = HenonMap{1.4, 0.1};
    auto S = henon_trapping_region(1.4, 0.1);
    auto mu = birkhoff_measure(f, {0.1, 0.0}, 200, 3000);
    // saddle-like constants: nothing on the sink can satisfy them
    auto c = lyapunov_constants(-2.9, 0.6, 0.2);
    SDOptions o;
    o.sample_k = 10;
    auto v = verify_strong_dissipation(f, S, mu, c, o);
    CHECK(v.sink_supported);
    CHECK(v.vacuous);
    CHECK(v.certified == 0);
    CHECK(v.decided == 0);
    CHECK(estimate_Xg(v) == 0.0);
}

TEST_CASE("branches at the fixed saddle") {
    HenonMap h{1.4, 0.1};
    PlanarMap f = h;
    auto S = henon_trapping_region(1.4, 0.1);
    Point2 p = henon_fixed_points(h).first;
    auto ev = jacobian(f, p).eigenvalues();
    double ms = std::min(std::abs(ev[0]), std::abs(ev[1])), mu = std::max(std::abs(ev[0]), std::abs(ev[1]));
    auto c = lyapunov_constants(std::log(ms), std::log(mu), 0.2);
    SDOptions o;
    OrbitSegment orbit;
    orbit.points.assign(orbit_need(o) + 1, p);
    auto at = branches_at(f, S, orbit, c, o);
    CHECK(at.certified);
    REQUIRE(at.branches);
    CHECK(at.branches->exit_plus);
    CHECK(at.branches->exit_minus);
    CHECK(at.r0 > 0);

    // the same point on its Dirac measure
    auto v = verify_strong_dissipation(f, S, periodic_measure(f, p, 1), c, o);
    CHECK(v.certified == 1);
    CHECK(v.decided == 1);
    CHECK(v.both_exit == 1);
    CHECK(v.fraction == 1.0);
    CHECK(estimate_Xg(v) == 1.0);
}

TEST_CASE("verifier pooled over periodic orbits") {
    PlanarMap f = HenonMap{1.4, 0.1};
    auto S = henon_trapping_region(1.4, 0.1);
    auto pv = verify_on_periodic_orbits(f, S, 4, 20, 0.2);
    REQUIRE_FALSE(pv.orbits.empty());
    std::size_t dec = 0, both = 0;
    for (const auto& ov : pv.orbits) {
        dec += ov.verdict.decided;
        both += ov.verdict.both_exit;
        if (ov.orbit.sink()) {
            CHECK(ov.verdict.vacuous);
        }
    }
    CHECK(pv.decided == dec);
    CHECK(pv.both_exit == both);
    CHECK(pv.decided >= 1);
    CHECK(pv.fraction == doctest::Approx(double(both) / dec));
    CHECK(pv.fraction >= 0.95);
}
