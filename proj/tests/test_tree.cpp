#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sdiss/errors.hpp"
#include "sdiss/io.hpp"
#include "sdiss/tree.hpp"

using namespace sdiss;

namespace {

Disc unit_square() { return Disc({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}); }

Chord vertical(const Disc& D, double c) {
    auto ch = clip_chord(D, {c, 0}, {{c, 0}, {c, 2}}, {{c, 0}, {c, -2}});
    REQUIRE(ch);
    return *ch;
}

ArcFamily family(const std::vector<double>& xs) {
    ArcFamily fam;
    fam.D = unit_square();
    for (double c : xs) add_arc(fam, vertical(fam.D, c), {c, 0}, std::nullopt);
    fam.seeds = fam.size();
    return fam;
}

// contraction onto (1/2, 0); preimage of {x = c} is {x = 2c - 1/2}
const PlanarMap toy = AffineMap{Mat2::diag(0.5, 0.5), {0.25, 0.0}};

bool connected(const RealTree& t) {
    std::vector<std::size_t> up(t.vertices.size());
    std::iota(up.begin(), up.end(), 0);
    auto find = [&](std::size_t v) {
        while (up[v] != v) v = up[v] = up[up[v]];
        return v;
    };
    for (auto [a, b] : t.edges) up[find(a)] = find(b);
    std::set<std::size_t> roots;
    for (std::size_t v = 0; v < up.size(); ++v) roots.insert(find(v));
    return roots.size() == 1;
}

}  // namespace

TEST_CASE("one arc, then parallel arcs") {
    auto t1 = build_tree(family({0.2}));
    CHECK(t1.vertices.size() == 3);
    CHECK(t1.edges.size() == 2);
    CHECK(t1.components == 2);

    for (std::size_t n : {2u, 5u, 9u}) {
        std::vector<double> xs;
        for (std::size_t i = 0; i < n; ++i) xs.push_back(-0.9 + 1.8 * (i + 0.5) / n);
        auto fam = family(xs);
        auto t = build_tree(fam);
        CHECK(t.vertices.size() == 2 * n + 1);
        CHECK(t.vertices.size() - t.edges.size() == 1);
        CHECK(connected(t));
        // a path: the two outer components are 2n edges apart
        std::size_t left = project(t, fam, {-0.99, 0}), right = project(t, fam, {0.99, 0});
        CHECK(t.distance(left, right) == 2 * n);
    }
}

TEST_CASE("projection") {
    auto fam = family({-0.3, 0.4});
    auto t = build_tree(fam);
    CHECK(project(t, fam, {0.4, 0.2}) == t.arc_vertex(1));
    CHECK(project(t, fam, {0.4 + 1e-12, 0.2}) == t.arc_vertex(1));
    std::size_t mid = project(t, fam, {0.0, 0.0});
    CHECK(t.vertices[mid].kind == VertexKind::Component);
    // locally constant away from the arcs
    for (Point2 d : {Point2{1e-12, 0}, Point2{0, -1e-12}, Point2{-1e-12, 1e-12}})
        CHECK(project(t, fam, Point2{0.05, 0.3} + d) == mid);
    CHECK(project(t, fam, {-0.8, 0}) != mid);
    CHECK_THROWS_AS(project(t, fam, {1.5, 0}), DomainError);
}

TEST_CASE("duplicate arcs are dropped") {
    auto fam = family({0.1});
    CHECK_FALSE(add_arc(fam, vertical(fam.D, 0.1), {0.1, 0}, std::nullopt));
    CHECK(fam.discarded == 1);
    CHECK(add_arc(fam, vertical(fam.D, 0.2), {0.2, 0}, std::nullopt) == std::optional<std::size_t>(1));
    CHECK(fam.size() == 2);
}

TEST_CASE("preimage-closed family gives an exact tree map") {
    auto fam = family({0.5, 0.53, 0.45});
    // 0.53 -> 0.56 -> 0.62 -> 0.74 -> 0.98; 0.45 -> 0.4 -> 0.3 -> 0.1 -> -0.3
    CHECK(close_under_preimages(toy, fam, 10, 2e-3, false));
    CHECK(fam.size() == 11);
    auto t = build_tree(fam);
    CHECK(t.vertices.size() - t.edges.size() == 1);
    CHECK(connected(t));
    auto tm = induced_map(t, fam, toy, 100, 3);
    CHECK(tm.flags() == 0);
    auto sc = check_semiconjugacy(t, fam, tm, toy, 10000, 5);
    CHECK(sc.tested == 10000);
    CHECK(sc.disagreements == 0);
    // the arc through the fixed point (1/2, 0) is fixed by h
    auto per = tree_periodic_points(tm, 4);
    REQUIRE_FALSE(per.empty());
    CHECK(std::find(per.begin(), per.end(), std::make_pair(t.arc_vertex(0), std::size_t(1))) != per.end());
}

TEST_CASE("a family that is not closed gets flagged") {
    // preimage {x = 0.1} of {x = 0.3} is missing
    auto fam = family({0.5, 0.3});
    auto t = build_tree(fam);
    auto tm = induced_map(t, fam, toy, 100, 3);
    CHECK(tm.flags() > 0);
    CHECK(check_semiconjugacy(t, fam, tm, toy, 2000, 5).disagreements > 0);
}

TEST_CASE("identity map") {
    PlanarMap id = AffineMap{};
    auto fam = family({-0.5, 0.0, 0.5});
    auto t = build_tree(fam);
    auto tm = induced_map(t, fam, id, 50, 1);
    for (std::size_t v = 0; v < tm.h.size(); ++v) CHECK(tm.h[v] == v);
    CHECK(tree_periodic_points(tm, 3).size() == t.vertices.size());
    std::vector<Point2> pts{{-0.7, 0.1}, {-0.2, 0.3}, {0.3, -0.5}, {0.8, 0.8}};
    auto e = tree_entropy(t, fam, id, pts, 2, 6, 0.05);
    CHECK(e.tree == 0.0);
    CHECK(e.plane == 0.0);
    CHECK(e.orbits == 4);
}

TEST_CASE("itinerary entropy of the full shift") {
    std::vector<std::vector<std::size_t>> all;
    for (std::size_t w = 0; w < 256; ++w) {
        std::vector<std::size_t> it;
        for (int i = 0; i < 8; ++i) it.push_back((w >> i) & 1);
        all.push_back(it);
    }
    CHECK(itinerary_entropy(all, 3, 7) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("refinement map") {
    auto coarse_fam = family({0.5});
    auto fine_fam = family({0.5, 0.3, 0.7});
    auto coarse = build_tree(coarse_fam), fine = build_tree(fine_fam);
    auto r = refinement_map(fine, coarse, coarse_fam);
    REQUIRE(r);
    CHECK((*r)[fine.arc_vertex(0)] == coarse.arc_vertex(0));
    // the new arcs sit in the two coarse components
    CHECK((*r)[fine.arc_vertex(1)] == project(coarse, coarse_fam, {0.3, 0}));
    CHECK((*r)[fine.arc_vertex(2)] == project(coarse, coarse_fam, {0.7, 0}));
}

TEST_CASE("tree json") {
    auto fam = family({0.2});
    auto t = build_tree(fam);
    auto tm = induced_map(t, fam, toy, 20, 1);
    auto j = tree_json(t, tm);
    REQUIRE(j["vertices"].size() == 3);
    CHECK(j["edges"].size() == 2);
    CHECK(j["map"].size() == 3);
    std::size_t arcs = 0;
    for (const auto& v : j["vertices"]) {
        CHECK(v.contains("id"));
        if (v["kind"] == "arc")
            ++arcs;
        else
            CHECK(v["polygon"].size() >= 3);
    }
    CHECK(arcs == 1);
}
