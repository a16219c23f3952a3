#include <doctest.h>

#include <cmath>

#include "sdiss/errors.hpp"
#include "sdiss/periodic.hpp"
#include "sdiss/stable_manifold.hpp"

using namespace sdiss;

namespace {

struct Saddle {
    PlanarMap f;
    Point2 p;
    double ls, lu;  // log |stable|, log |unstable|
    Point2 v;       // stable eigenvector
};

Saddle henon_saddle(double b) {
    HenonMap h{1.4, b};
    Saddle s{h, henon_fixed_points(h).first, 0, 0, {}};
    Mat2 J = jacobian(s.f, s.p);
    auto ev = J.eigenvalues();
    double e0 = ev[0].real(), e1 = ev[1].real();
    if (std::abs(e0) > std::abs(e1)) std::swap(e0, e1);
    s.ls = std::log(std::abs(e0));
    s.lu = std::log(std::abs(e1));
    s.v = eigenvector(J, e0);
    return s;
}

OrbitSegment constant_orbit(Point2 p, std::size_t n) {
    OrbitSegment o;
    o.points.assign(n + 1, p);
    return o;
}

}  // namespace

TEST_CASE("rates") {
    auto c = lyapunov_constants(std::log(0.3), std::log(2.0), 0.1);
    REQUIRE(c.pinched());
    auto r = choose_rates(c);
    CHECK(r.lambda1 > c.sigma);
    CHECK(r.lambda1 < 1);
    CHECK(r.lambda2 > 0);
    CHECK(r.lambda2 < c.rho_tilde);
    CHECK(c.sigma_tilde * r.lambda2 / (r.lambda1 * c.rho) > r.lambda1);
    CHECK_NOTHROW(check_rates(c, r));
    CHECK_THROWS_AS(check_rates(c, {c.sigma * 0.5, r.lambda2}), ParameterError);
    // weak contraction relative to eps: no pinching
    auto loose = lyapunov_constants(-0.2, 0.5, 0.1);
    CHECK_THROWS_AS(choose_rates(loose), ParameterError);
}

TEST_CASE("chart sequence of a linear saddle against closed forms") {
    const double s = 0.3, u = 2.0;
    PlanarMap f = AffineMap{Mat2::diag(s, u), {}};
    auto c = lyapunov_constants(std::log(s), std::log(u), 0.1);
    auto rates = choose_rates(c);
    auto cs = chart_sequence(f, iterate(f, {0, 0}, 600), c, rates, 50, 40);
    const double q = s / rates.lambda1, rr = s / (rates.lambda2 * u);
    for (std::size_t n = 0; n <= 51; ++n) {
        // A_n = sum_{k <= T - n} q^k, B_n = sum_{j <= n} rr^j
        double A = (1 - std::pow(q, double(cs.T - n + 1))) / (1 - q);
        double B = (1 - std::pow(rr, double(n + 1))) / (1 - rr);
        CHECK(cs.A[n] == doctest::Approx(A).epsilon(1e-12));
        CHECK(cs.B[n] == doctest::Approx(B).epsilon(1e-12));
        CHECK(cs.A[n] <= cs.C0 * std::pow(rates.lambda1 / c.sigma_tilde, double(n)));
        CHECK(cs.B[n] <= cs.C0 * std::pow(c.rho / rates.lambda2, double(n)));
    }
    auto ck = check_chart(cs);
    CHECK(ck.recursion_A <= 1e-9);
    CHECK(ck.recursion_B <= 1e-9);
    CHECK(ck.ok());
    // a_n = A_{n+1} s / A_n
    CHECK(cs.a[3] == doctest::Approx(cs.A[4] * s / cs.A[3]));
}

TEST_CASE("chart sequence at the Henon saddle") {
    auto sd = henon_saddle(0.1);
    auto c = lyapunov_constants(sd.ls, sd.lu, 0.2);
    auto cs = chart_sequence(sd.f, constant_orbit(sd.p, 800), c, choose_rates(c), 50, 40);
    auto ck = check_chart(cs);
    CHECK(ck.ok(1e-9));
    CHECK(cs.r[0] > 0);
    // wrong constants: the certificate is re-checked
    auto bad = lyapunov_constants(sd.ls - 1.0, sd.lu, 0.2);
    CHECK_THROWS_AS(chart_sequence(sd.f, constant_orbit(sd.p, 800), bad, choose_rates(bad), 50, 40), ParameterError);
}

TEST_CASE("chebyshev graphs") {
    auto nodes = ChebGraph::nodes(9, 2.0);
    std::vector<double> vals;
    for (double x : nodes) vals.push_back(x * x - 0.5 * x);
    ChebGraph g(2.0, vals);
    for (double x : {-1.7, -0.3, 0.0, 1.1}) {
        CHECK(g(x) == doctest::Approx(x * x - 0.5 * x).epsilon(1e-12));
        CHECK(g.deriv(x) == doctest::Approx(2 * x - 0.5).epsilon(1e-10));
    }
    std::vector<double> lin;
    for (double x : nodes) lin.push_back(0.75 * x);
    // length of a line of slope 3/4 over [0, 2] is 2.5
    CHECK(ChebGraph(2.0, lin).length(0, 2) == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("linear saddle: the stable curve is the contracting axis") {
    const double s = 0.3, u = 2.0;
    PlanarMap f = AffineMap{Mat2::diag(s, u), {}};
    auto c = lyapunov_constants(std::log(s), std::log(u), 0.1);
    auto cs = chart_sequence(f, iterate(f, {0, 0}, 600), c, choose_rates(c), 50, 40);
    auto curve = local_stable_curve(f, cs);
    CHECK(curve.r0 > 0);
    for (Point2 p : curve.points) CHECK(std::abs(p.y) < 1e-12);
    for (std::size_t n = 1; n < curve.forward_lengths.size(); ++n)
        CHECK(curve.forward_lengths[n] == doctest::Approx(s * curve.forward_lengths[n - 1]).epsilon(1e-9));
}

TEST_CASE("local stable curve at the Henon saddle") {
    for (double b : {0.05, 0.1, 0.2}) {
        auto sd = henon_saddle(b);
        auto c = lyapunov_constants(sd.ls, sd.lu, 0.2);
        auto cs = chart_sequence(sd.f, constant_orbit(sd.p, 800), c, choose_rates(c), 50, 40);
        auto curve = local_stable_curve(sd.f, cs);
        CHECK(line_angle(curve.E, sd.v) < 1e-4);
        REQUIRE(curve.forward_lengths.size() == 51);
        for (std::size_t n = 1; n < curve.forward_lengths.size(); ++n)
            CHECK(curve.forward_lengths[n] < curve.forward_lengths[n - 1]);
        // both ends converge to the saddle
        CHECK(dist(curve.ends_plus.back(), sd.p) < 1e-3 * dist(curve.ends_plus.front(), sd.p));
        CHECK(dist(curve.ends_minus.back(), sd.p) < 1e-3 * dist(curve.ends_minus.front(), sd.p));
        // the curve bends away from the eigenline only at second order
        double far = 0;
        for (Point2 q : curve.points) far = std::max(far, std::abs(cross(q - sd.p, normalized(sd.v))));
        CHECK(far < 10 * curve.r0 * curve.r0 + 1e-12);
    }
}

TEST_CASE("grown branches at the saddle leave the region") {
    auto sd = henon_saddle(0.1);
    auto S = henon_trapping_region(1.4, 0.1);
    auto c = lyapunov_constants(sd.ls, sd.lu, 0.2);
    auto orbit = constant_orbit(sd.p, 900);
    auto td = tangent_data(sd.f, orbit, 800, 40);
    auto cs = chart_sequence(sd.f, td, c, choose_rates(c), 50);
    auto curve = local_stable_curve(sd.f, cs);
    GrowOptions g;
    g.r0 = curve.r0;
    auto br = grow_branches(sd.f, td, S, g);
    CHECK(br.exit_plus);
    CHECK(br.exit_minus);
    CHECK(br.plus.front() == sd.p);
    CHECK(br.minus.front() == sd.p);
    // exit point: in S but outside f(S)
    CHECK_FALSE(f_of_S_membership(sd.f, S, br.plus.back()));
    // points along the branch lie on W^s: forward orbits come close to the
    // saddle before rounding drives them off along the unstable direction
    Point2 mid = br.plus[br.plus.size() / 2];
    double d0 = dist(mid, sd.p), closest = d0;
    for (std::size_t n = 1; n <= 60; ++n) closest = std::min(closest, dist(iterate_point(sd.f, mid, n), sd.p));
    CHECK(closest < 1e-6 * d0);
}

TEST_CASE("f(S) membership") {
    PlanarMap f = HenonMap{1.4, 0.1};
    auto S = henon_trapping_region(1.4, 0.1);
    Point2 in = iterate_point(f, {0.1, 0.0}, 10);
    CHECK(f_of_S_membership(f, S, sdiss::apply(f, in)));
    // |y| <= b (1/2 + 1/a) on f(S)
    CHECK_FALSE(f_of_S_membership(f, S, {0.0, 0.14}));
}
