#include <doctest.h>

#include <cmath>

#include "sdiss/ergodic.hpp"
#include "sdiss/errors.hpp"
#include "sdiss/periodic.hpp"

using namespace sdiss;

TEST_CASE("lyapunov exponents of a linear saddle") {
    PlanarMap f = AffineMap{Mat2::diag(0.5, 2.0), {}};
    auto l = lyapunov(f, {0.0, 0.0}, 2000, 0);
    CHECK(l.lambda_minus == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(l.lambda_plus == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("lyapunov sum equals log |b|") {
    for (double b : {0.1, -0.1, 0.3}) {
        auto l = lyapunov(HenonMap{1.4, b}, {0.1, 0.0}, 20000, 500);
        CHECK(std::abs(l.lambda_minus + l.lambda_plus - std::log(std::abs(b))) < 1e-3);
    }
    // chaotic side: a positive exponent
    auto l = lyapunov(HenonMap{1.4, -0.1}, {0.1, 0.0}, 50000, 1000);
    CHECK(l.lambda_plus > 0.2);
}

TEST_CASE("escape raises") {
    CHECK_THROWS_AS(lyapunov(HenonMap{1.4, 0.3}, {5.0, 5.0}, 1000, 0), NumericalError);
    auto seg = iterate(HenonMap{1.4, 0.3}, {5.0, 5.0}, 1000);
    CHECK(seg.overflow);
    CHECK(seg.length() < 1000);
}

TEST_CASE("orbits and measures") {
    PlanarMap f = HenonMap{1.4, 0.3};
    auto seg = iterate(f, {0.1, 0.0}, 50);
    CHECK(seg.length() == 50);
    CHECK(orbit_defect(f, seg) == 0.0);
    seg.points[10].x += 1e-3;
    CHECK(orbit_defect(f, seg) > 1e-4);

    auto mu = birkhoff_measure(f, {0.1, 0.0}, 100, 20);
    CHECK(mu.size() == 101);
    CHECK(mu.burn == 20);
    CHECK(mu.samples[0] == iterate(f, {0.1, 0.0}, 20).points.back());
    CHECK(mu.weight() == doctest::Approx(1.0 / 101));
}

TEST_CASE("recurrent return") {
    OrbitSegment seg;
    seg.points = {{0, 0}, {1, 0}, {2, 0}, {1.005, 0}, {0.5, 0}};
    auto r = find_recurrent_return(seg, 0.01);
    REQUIRE(r);
    CHECK(r->first == 1);
    CHECK(r->second == 2);
    CHECK_FALSE(find_recurrent_return(seg, 0.001));
    CHECK_THROWS_AS(find_recurrent_return(seg, 0.0), ParameterError);
}

TEST_CASE("recurrence scan and spatial hash agree") {
    // long segment takes the hashed path; compare with a direct scan
    auto seg = iterate(HenonMap{1.4, 0.3}, {0.1, 0.0}, 12000);
    for (double delta : {1e-3, 1e-4}) {
        auto r = find_recurrent_return(seg, delta);
        std::optional<std::pair<std::size_t, std::size_t>> want;
        for (std::size_t i = 0; i < seg.points.size() && !want; ++i)
            for (std::size_t j = i + 1; j < seg.points.size(); ++j)
                if (dist(seg.points[i], seg.points[j]) < delta) {
                    want = std::make_pair(i, j - i);
                    break;
                }
        CHECK(r == want);
    }
}

TEST_CASE("fixed points and orbit classes") {
    HenonMap m{1.4, 0.3};
    auto [p, q] = henon_fixed_points(m);
    for (Point2 z : {p, q}) CHECK(dist(apply(m, z), z) < 1e-14);
    CHECK(p.x > q.x);
    Point2 out = henon_outer_fixed_point(m);
    CHECK(out.x < -0.5 - 1 / m.a);
    CHECK(out.x > -3);

    CHECK(classify_orbit(m, {10.0, 0.0}, 100).tag == OrbitTag::Escapes);
    CHECK(classify_orbit(m, {0.0, 0.0}, 100).tag == OrbitTag::EntersTrappingRegion);
    CHECK(classify_orbit(m, out, 100).tag == OrbitTag::ConvergesToFixedPoint);
    CHECK(std::string(to_string(OrbitTag::Escapes)) == "Escapes");
}

TEST_CASE("newton finds the period-2 sink at b = 0.1") {
    PlanarMap f = HenonMap{1.4, 0.1};
    // the attractor at these parameters: a plain orbit settles on it
    Point2 z = iterate(f, {0.1, 0.0}, 5000).points.back();
    auto o = newton_periodic(f, {z}, 2);
    REQUIRE(o);
    CHECK(o->q == 2);
    CHECK(o->residual < 1e-12);
    CHECK(o->sink());
    CHECK(dist(o->p, z) < 1e-6);
    // multipliers multiply to det Df^2 = b^2
    CHECK(std::abs(o->multipliers[0] * o->multipliers[1] - 0.01) < 1e-12);
}

TEST_CASE("periodic orbit search") {
    PlanarMap f = HenonMap{1.4, 0.1};
    auto S = henon_trapping_region(1.4, 0.1);
    auto orbits = find_periodic_orbits(f, S, 4, 20);
    REQUIRE(orbits.size() >= 2);
    bool saddle1 = false, sink2 = false;
    for (const auto& o : orbits) {
        CHECK(o.residual < 1e-8);
        CHECK(minimal_period(f, o.p, o.q) == o.q);
        saddle1 |= o.q == 1 && o.saddle();
        sink2 |= o.q == 2 && o.sink();
    }
    CHECK(saddle1);
    CHECK(sink2);
    // the fixed saddle is the larger-x fixed point
    auto fp = henon_fixed_points(HenonMap{1.4, 0.1}).first;
    CHECK(dist(orbits[0].p, fp) < 1e-12);
}

TEST_CASE("minimal period reduction") {
    PlanarMap f = HenonMap{1.4, 0.1};
    auto fp = henon_fixed_points(HenonMap{1.4, 0.1}).first;
    CHECK(minimal_period(f, fp, 6) == 1);
    auto d = describe_orbit(f, fp, 4);
    CHECK(d.q == 1);
    CHECK(d.saddle());
}
