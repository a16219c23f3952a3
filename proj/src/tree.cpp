#include "sdiss/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "sdiss/errors.hpp"
#include "sdiss/parallel.hpp"
#include "sdiss/random.hpp"

namespace sdiss {

// ---------------------------------------------------------------------------
// arcs

std::vector<std::vector<double>> ArcFamily::distances() const {
    const std::size_t n = arcs.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = polyline_distance(arcs[i].pts, arcs[j].pts, 1.0);
    return d;
}

std::optional<std::size_t> add_arc(ArcFamily& fam, Chord arc, Point2 base, std::optional<std::size_t> parent) {
    if (arc.pts.size() < 2) {
        ++fam.discarded;
        return std::nullopt;
    }
    const BBox b = bounding_box(arc.pts);
    for (const auto& other : fam.arcs) {
        if (!b.overlaps(bounding_box(other.pts), arc_tolerance)) continue;
        if (polyline_distance(arc.pts, other.pts, arc_tolerance) < arc_tolerance) {
            ++fam.discarded;
            return std::nullopt;
        }
    }
    // endpoints must not coincide with existing ones on the boundary either
    for (const auto& other : fam.arcs)
        if (arc.sa == other.sa || arc.sa == other.sb || arc.sb == other.sa || arc.sb == other.sb) {
            ++fam.discarded;
            return std::nullopt;
        }
    fam.arcs.push_back(std::move(arc));
    fam.base.push_back(base);
    fam.parent.push_back(parent);
    return fam.arcs.size() - 1;
}

namespace {

// f^-1 along the polyline, with midpoints of the original inserted wherever
// consecutive preimages are more than h_max apart.
Polyline pull_back(const PlanarMap& f, const Polyline& pl, double h_max, std::size_t max_points) {
    Polyline out;
    out.push_back(apply_inverse(f, pl.front()));
    for (std::size_t i = 0; i + 1 < pl.size(); ++i) {
        struct Piece {
            Point2 a, b;  // on pl
            Point2 fa, fb;
            int depth;
        };
        std::vector<Piece> stack{{pl[i], pl[i + 1], out.back(), apply_inverse(f, pl[i + 1]), 0}};
        while (!stack.empty()) {
            Piece p = stack.back();
            stack.pop_back();
            if (dist(p.fa, p.fb) > h_max && p.depth < 40) {
                Point2 m = 0.5 * (p.a + p.b);
                Point2 fm = apply_inverse(f, m);
                // right half pushed first so the left is processed first
                stack.push_back({m, p.b, fm, p.fb, p.depth + 1});
                stack.push_back({p.a, m, p.fa, fm, p.depth + 1});
                continue;
            }
            out.push_back(p.fb);
            if (out.size() > max_points) throw NumericalError("preimage curve exceeds the point budget");
        }
    }
    return out;
}

}  // namespace

std::size_t preimage_round(const PlanarMap& f, ArcFamily& fam, std::size_t from, double h_max, bool meet_image) {
    const std::size_t end = fam.arcs.size();
    std::size_t added = 0;
    const Disc& D = fam.D;
    for (std::size_t a = from; a < end; ++a) {
        Polyline P = pull_back(f, fam.arcs[a].pts, h_max, 2'000'000);
        // maximal runs of vertices inside D
        std::size_t i = 0;
        while (i < P.size()) {
            if (!D.contains(P[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < P.size() && D.contains(P[j])) ++j;
            // anchor near the middle of the run, away from the boundary; in f(D)
            // (f^-1 of it in D) when required
            auto ok = [&](std::size_t k) { return !meet_image || D.contains(apply_inverse(f, P[k])); };
            std::optional<std::size_t> anchor;
            const std::size_t mid = i + (j - i) / 2;
            for (std::size_t d = 0; !anchor && (mid >= i + d || mid + d < j); ++d) {
                if (mid + d < j && ok(mid + d))
                    anchor = mid + d;
                else if (mid >= i + d && ok(mid - d))
                    anchor = mid - d;
            }
            if (anchor) {
                const std::size_t k = *anchor;
                Polyline plus(P.begin() + static_cast<std::ptrdiff_t>(k), P.end());
                Polyline minus(P.rbegin() + static_cast<std::ptrdiff_t>(P.size() - 1 - k), P.rend());
                if (auto c = clip_chord(D, P[k], plus, minus))
                    if (add_arc(fam, std::move(*c), P[k], a)) ++added;
            }
            i = j;
        }
    }
    ++fam.rounds;
    return added;
}

bool close_under_preimages(const PlanarMap& f, ArcFamily& fam, std::size_t max_rounds, double h_max,
                           bool meet_image) {
    std::size_t from = 0;
    for (std::size_t r = 0; r < max_rounds; ++r) {
        const std::size_t before = fam.arcs.size();
        if (preimage_round(f, fam, from, h_max, meet_image) == 0) return true;
        from = before;
    }
    return false;
}

std::vector<ArcSeed> seeds_from_points(const PlanarMap& f, const std::vector<Point2>& points,
                                       const CertificateConstants& c, const SDOptions& sd) {
    std::vector<ArcSeed> out;
    const std::size_t len = orbit_need(sd);
    for (Point2 p : points) out.push_back({iterate(f, p, len), c});
    return out;
}

std::vector<ArcSeed> seeds_from_cycle(const std::vector<Point2>& cycle, const CertificateConstants& c,
                                      const SDOptions& sd) {
    std::vector<ArcSeed> out;
    const std::size_t len = orbit_need(sd), q = cycle.size();
    for (std::size_t i = 0; i < q; ++i) {
        ArcSeed s;
        s.constants = c;
        for (std::size_t j = 0; j <= len; ++j) s.orbit.points.push_back(cycle[(i + j) % q]);
        out.push_back(std::move(s));
    }
    return out;
}

ArcFamily collect_arcs(const PlanarMap& f, const TrappingRegion& S, const Disc& D, std::size_t n_arcs,
                       const std::vector<ArcSeed>& seeds, const ArcOptions& opt) {
    ArcFamily fam;
    fam.D = D;
    const std::size_t batch = std::max<std::size_t>(8, 2 * static_cast<std::size_t>(std::max(1u, opt.sd.threads)));
    for (std::size_t start = 0; start < seeds.size() && fam.seeds < n_arcs; start += batch) {
        const std::size_t m = std::min(batch, seeds.size() - start);
        std::vector<std::optional<Chord>> chords(m);
        parallel_for(m, opt.sd.threads, [&](std::size_t i) {
            const auto& sd = seeds[start + i];
            if (sd.orbit.points.empty() || !D.contains(sd.orbit.points[0])) return;
            auto a = branches_at(f, S, sd.orbit, sd.constants, opt.sd);
            if (!a.branches || !a.branches->exit_plus || !a.branches->exit_minus) return;
            chords[i] = clip_chord(D, sd.orbit.points[0], a.branches->plus, a.branches->minus);
        });
        // sequential insertion keeps the family independent of the thread count
        for (std::size_t i = 0; i < m && fam.seeds < n_arcs; ++i)
            if (chords[i] && add_arc(fam, std::move(*chords[i]), seeds[start + i].orbit.points[0], std::nullopt))
                ++fam.seeds;
    }
    std::size_t from = 0;
    for (std::size_t r = 0; r < opt.preimage_rounds; ++r) {
        const std::size_t before = fam.arcs.size();
        preimage_round(f, fam, from, opt.h_max, opt.meet_image);
        from = before;
    }
    if (fam.arcs.size() < 2)
        throw GeometryError("collect_arcs: insufficient arcs (" + std::to_string(fam.arcs.size()) + " found)");
    return fam;
}

// ---------------------------------------------------------------------------
// tree

namespace detail {

// Segment buckets for near-arc tests and row buckets for point-in-face tests.
class Locator {
public:
    Locator(const ArcFamily& fam, const std::vector<TreeVertex>& verts, std::size_t components) {
        box_ = fam.D.box();
        w_ = std::max(box_.xmax - box_.xmin, 1e-300) / G;
        h_ = std::max(box_.ymax - box_.ymin, 1e-300) / G;
        cells_.resize(static_cast<std::size_t>(G) * G);
        for (std::size_t a = 0; a < fam.arcs.size(); ++a) {
            const auto& pts = fam.arcs[a].pts;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                auto [x0, y0] = cell(std::min(pts[i].x, pts[i + 1].x) - arc_tolerance,
                                     std::min(pts[i].y, pts[i + 1].y) - arc_tolerance);
                auto [x1, y1] = cell(std::max(pts[i].x, pts[i + 1].x) + arc_tolerance,
                                     std::max(pts[i].y, pts[i + 1].y) + arc_tolerance);
                for (int gx = x0; gx <= x1; ++gx)
                    for (int gy = y0; gy <= y1; ++gy)
                        cells_[static_cast<std::size_t>(gy) * G + static_cast<std::size_t>(gx)].push_back(
                            {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(i)});
            }
        }
        rows_.resize(components);
        for (std::size_t v = 0; v < components; ++v) {
            const auto& poly = verts[v].polygon;
            auto& rows = rows_[v];
            rows.resize(G);
            for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
                const Point2 a = poly[i], b = poly[(i + 1) % n];
                int r0 = row(std::min(a.y, b.y)), r1 = row(std::max(a.y, b.y));
                for (int r = r0; r <= r1; ++r) rows[static_cast<std::size_t>(r)].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }

    std::optional<std::size_t> near_arc(const ArcFamily& fam, Point2 p) const {
        auto [gx, gy] = cell(p.x, p.y);
        const auto& c = cells_[static_cast<std::size_t>(gy) * G + static_cast<std::size_t>(gx)];
        std::optional<std::size_t> best;
        double bd = arc_tolerance;
        for (auto [a, i] : c) {
            const auto& pts = fam.arcs[a].pts;
            double d = distance_to_segment(p, pts[i], pts[i + 1]);
            if (d <= bd) {
                if (!best || d < bd || a < *best) best = a;
                bd = d;
            }
        }
        return best;
    }

    bool in_face(const std::vector<TreeVertex>& verts, std::size_t v, Point2 p) const {
        const auto& poly = verts[v].polygon;
        const auto& edges = rows_[v][static_cast<std::size_t>(row(p.y))];
        bool inside = false;
        for (auto i : edges) {
            const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
            if ((a.y > p.y) != (b.y > p.y)) {
                double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < xi) inside = !inside;
            }
        }
        return inside;
    }

private:
    static constexpr int G = 256;
    int clampi(double v) const { return std::clamp(static_cast<int>(std::floor(v)), 0, G - 1); }
    std::pair<int, int> cell(double x, double y) const {
        return {clampi((x - box_.xmin) / w_), clampi((y - box_.ymin) / h_)};
    }
    int row(double y) const { return clampi((y - box_.ymin) / h_); }

    BBox box_{};
    double w_ = 1, h_ = 1;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> cells_;
    std::vector<std::vector<std::vector<std::uint32_t>>> rows_;
};

}  // namespace detail

namespace {

// A point strictly inside the polygon, away from its edges: stepped inward
// from the midpoint of the longest edge.
Point2 interior_point(const Polyline& poly) {
    const std::size_t n = poly.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dist(poly[a], poly[(a + 1) % n]) > dist(poly[b], poly[(b + 1) % n]);
    });
    const double sgn = signed_area(poly) >= 0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < std::min<std::size_t>(n, 16); ++k) {
        const Point2 a = poly[order[k]], b = poly[(order[k] + 1) % n];
        const double L = dist(a, b);
        if (!(L > 0)) continue;
        const Point2 m = 0.5 * (a + b), in = sgn * perp((b - a) / L);
        for (double t = 0.25 * L; t > 1e-7 * L; t *= 0.5) {
            Point2 p = m + t * in;
            if (point_in_polygon(poly, p) && distance_to_polygon_boundary(poly, p) > 0.25 * t) return p;
        }
    }
    throw GeometryError("no interior point found for a component");
}

}  // namespace

std::size_t RealTree::distance(std::size_t u, std::size_t v) const {
    if (u == v) return 0;
    std::vector<std::size_t> d(vertices.size(), std::numeric_limits<std::size_t>::max());
    std::queue<std::size_t> q;
    d[u] = 0;
    q.push(u);
    while (!q.empty()) {
        std::size_t a = q.front();
        q.pop();
        for (std::size_t b : adj[a])
            if (d[b] == std::numeric_limits<std::size_t>::max()) {
                d[b] = d[a] + 1;
                if (b == v) return d[b];
                q.push(b);
            }
    }
    return d[v];
}

RealTree build_tree(const ArcFamily& fam) {
    if (fam.arcs.empty()) throw ParameterError("build_tree: at least one arc is needed");
    auto faces = subdivide(fam.D, fam.arcs);
    RealTree t;
    t.components = faces.size();
    for (auto& fc : faces) {
        TreeVertex v;
        v.kind = VertexKind::Component;
        v.box = bounding_box(fc.polygon);
        v.polygon = std::move(fc.polygon);
        v.inside = interior_point(v.polygon);
        t.vertices.push_back(std::move(v));
    }
    for (std::size_t a = 0; a < fam.arcs.size(); ++a) {
        TreeVertex v;
        v.kind = VertexKind::Arc;
        v.arc = a;
        v.box = bounding_box(fam.arcs[a].pts);
        const auto& pts = fam.arcs[a].pts;
        v.inside = point_at_arclength(pts, arclength(pts), 0.5 * polyline_length(pts));
        t.vertices.push_back(std::move(v));
    }
    t.adj.resize(t.vertices.size());
    for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t a : faces[i].chords) {
            t.edges.push_back({i, t.arc_vertex(a)});
            t.adj[i].push_back(t.arc_vertex(a));
            t.adj[t.arc_vertex(a)].push_back(i);
        }
    // verified, not assumed: connected with V - 1 edges
    std::vector<char> seen(t.vertices.size(), 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
        std::size_t a = q.front();
        q.pop();
        for (std::size_t b : t.adj[a])
            if (!seen[b]) {
                seen[b] = 1;
                ++reached;
                q.push(b);
            }
    }
    if (reached != t.vertices.size()) throw GeometryError("build_tree: incidence graph is disconnected");
    if (t.edges.size() + 1 != t.vertices.size())
        throw GeometryError("build_tree: incidence graph has a cycle (V = " + std::to_string(t.vertices.size()) +
                            ", E = " + std::to_string(t.edges.size()) + ")");
    t.index = std::make_shared<detail::Locator>(fam, t.vertices, t.components);
    return t;
}

std::size_t project(const RealTree& tree, const ArcFamily& fam, Point2 p) {
    if (!is_finite(p) || !fam.D.contains(p)) throw DomainError("project: point outside the disc");
    if (auto a = tree.index->near_arc(fam, p)) return tree.arc_vertex(*a);
    for (std::size_t v = 0; v < tree.components; ++v)
        if (tree.vertices[v].box.contains(p) && tree.index->in_face(tree.vertices, v, p)) return v;
    // on a face edge to rounding: nearest face
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < tree.components; ++v) {
        if (!tree.vertices[v].box.contains(p, 1e-9)) continue;
        double d = distance_to_polygon_boundary(tree.vertices[v].polygon, p);
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// induced map

std::size_t TreeMap::flags() const {
    return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), char(1)));
}

namespace {

std::vector<Point2> vertex_samples(const RealTree& tree, const ArcFamily& fam, std::size_t v, std::size_t k,
                                   const CounterRng& rng) {
    std::vector<Point2> out;
    const auto& tv = tree.vertices[v];
    if (tv.kind == VertexKind::Arc) {
        const auto& pts = fam.arcs[tv.arc].pts;
        auto s = arclength(pts);
        for (std::size_t i = 0; i < k; ++i) out.push_back(point_at_arclength(pts, s, s.back() * (i + 0.5) / k));
        return out;
    }
    out.push_back(tv.inside);
    const std::uint64_t max_draws = 200000;
    for (std::uint64_t i = 0; out.size() < k && i < max_draws; ++i) {
        Point2 p = rng.point_in_box(i, tv.box);
        if (fam.D.contains(p) && project(tree, fam, p) == v) out.push_back(p);
    }
    return out;
}

}  // namespace

TreeMap induced_map(const RealTree& tree, const ArcFamily& fam, const PlanarMap& f, std::size_t samples,
                    std::uint64_t seed) {
    const std::size_t V = tree.vertices.size();
    TreeMap tm;
    tm.h.assign(V, 0);
    tm.flagged.assign(V, 0);
    tm.escaped.assign(V, 0);
    CounterRng rng(seed);
    for (std::size_t v = 0; v < V; ++v) {
        std::map<std::size_t, std::size_t> votes;
        for (Point2 p : vertex_samples(tree, fam, v, samples, rng.substream(v))) {
            Point2 q = apply(f, p);
            if (!is_finite(q) || !fam.D.contains(q)) {
                ++tm.escaped[v];
                continue;
            }
            ++votes[project(tree, fam, q)];
        }
        if (votes.empty()) {
            tm.h[v] = v;
            continue;
        }
        std::size_t best = votes.begin()->first, bc = 0;
        for (auto [w, c] : votes)
            if (c > bc) {
                best = w;
                bc = c;
            }
        tm.h[v] = best;
        tm.flagged[v] = votes.size() > 1;
    }
    return tm;
}

SemiconjugacyCheck check_semiconjugacy(const RealTree& tree, const ArcFamily& fam, const TreeMap& tm,
                                       const PlanarMap& f, std::size_t n_points, std::uint64_t seed,
                                       unsigned threads) {
    CounterRng rng(seed);
    std::vector<int> res(n_points, -1);  // -1 skipped, 0 agree, 1 disagree
    const BBox box = fam.D.box();
    parallel_for(n_points, threads, [&](std::size_t i) {
        // first draw of stream i inside D
        for (std::uint64_t k = 0; k < 1000; ++k) {
            Point2 p = rng.substream(i).point_in_box(k, box);
            if (!fam.D.contains(p)) continue;
            Point2 q = apply(f, p);
            if (!is_finite(q) || !fam.D.contains(q)) return;
            res[i] = tm.h[project(tree, fam, p)] == project(tree, fam, q) ? 0 : 1;
            return;
        }
    });
    SemiconjugacyCheck c;
    for (int r : res) {
        if (r < 0)
            ++c.skipped;
        else {
            ++c.tested;
            c.disagreements += static_cast<std::size_t>(r);
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// entropy, periodic vertices

double itinerary_entropy(const std::vector<std::vector<std::size_t>>& itineraries, std::size_t n1, std::size_t n2) {
    if (!(n1 >= 1 && n2 > n1)) throw ParameterError("itinerary_entropy: need 1 <= n1 < n2");
    auto count = [&](std::size_t n) {
        std::set<std::vector<std::size_t>> s;
        for (const auto& it : itineraries)
            if (it.size() >= n) s.insert(std::vector<std::size_t>(it.begin(), it.begin() + static_cast<std::ptrdiff_t>(n)));
        return s.size();
    };
    std::size_t c1 = count(n1), c2 = count(n2);
    if (c1 == 0 || c2 == 0) return 0.0;
    return (std::log(static_cast<double>(c2)) - std::log(static_cast<double>(c1))) / static_cast<double>(n2 - n1);
}

std::vector<std::vector<std::size_t>> vertex_itineraries(const RealTree& tree, const ArcFamily& fam,
                                                         const PlanarMap& f, const std::vector<Point2>& samples,
                                                         std::size_t n, unsigned threads) {
    std::vector<std::vector<std::size_t>> itin(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        Point2 p = samples[i];
        std::vector<std::size_t> it;
        for (std::size_t t = 0; t < n; ++t) {
            if (!is_finite(p) || !fam.D.contains(p)) return;
            it.push_back(project(tree, fam, p));
            p = apply(f, p);
        }
        itin[i] = std::move(it);
    });
    return itin;
}

namespace {

std::size_t separated_count(const std::vector<std::vector<Point2>>& orbits, std::size_t n, double eps) {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        bool far = true;
        for (std::size_t j : chosen) {
            bool close = true;
            for (std::size_t t = 0; t < n && close; ++t) close = dist(orbits[i][t], orbits[j][t]) <= eps;
            if (close) {
                far = false;
                break;
            }
        }
        if (far) chosen.push_back(i);
    }
    return chosen.size();
}

}  // namespace

EntropyEstimate tree_entropy(const RealTree& tree, const ArcFamily& fam, const PlanarMap& f,
                             const std::vector<Point2>& samples, std::size_t n1, std::size_t n2, double eps_plane,
                             unsigned threads) {
    if (!(n1 >= 1 && n2 > n1)) throw ParameterError("tree_entropy: need 1 <= n1 < n2");
    std::vector<std::vector<Point2>> orbit(samples.size());
    std::vector<std::vector<std::size_t>> itin(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        Point2 p = samples[i];
        std::vector<Point2> o;
        std::vector<std::size_t> it;
        for (std::size_t t = 0; t < n2; ++t) {
            if (!is_finite(p) || !fam.D.contains(p)) return;
            o.push_back(p);
            it.push_back(project(tree, fam, p));
            p = apply(f, p);
        }
        orbit[i] = std::move(o);
        itin[i] = std::move(it);
    });
    std::vector<std::vector<Point2>> kept;
    std::vector<std::vector<std::size_t>> kept_it;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (itin[i].size() == n2) {
            kept.push_back(std::move(orbit[i]));
            kept_it.push_back(std::move(itin[i]));
        }
    EntropyEstimate e;
    e.n1 = n1;
    e.n2 = n2;
    e.orbits = kept.size();
    if (kept.empty()) return e;
    auto count = [&](std::size_t n) {
        std::set<std::vector<std::size_t>> s;
        for (const auto& it : kept_it) s.insert(std::vector<std::size_t>(it.begin(), it.begin() + static_cast<std::ptrdiff_t>(n)));
        return s.size();
    };
    e.tree_count1 = count(n1);
    e.tree_count2 = count(n2);
    e.plane_count1 = separated_count(kept, n1, eps_plane);
    e.plane_count2 = separated_count(kept, n2, eps_plane);
    const double dn = static_cast<double>(n2 - n1);
    e.tree = (std::log(static_cast<double>(e.tree_count2)) - std::log(static_cast<double>(e.tree_count1))) / dn;
    e.plane = (std::log(static_cast<double>(e.plane_count2)) - std::log(static_cast<double>(e.plane_count1))) / dn;
    return e;
}

std::vector<std::pair<std::size_t, std::size_t>> tree_periodic_points(const TreeMap& tm, std::size_t max_q) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t v = 0; v < tm.h.size(); ++v) {
        std::size_t w = v;
        for (std::size_t q = 1; q <= max_q; ++q) {
            w = tm.h[w];
            if (w == v) {
                out.push_back({v, q});
                break;
            }
        }
    }
    return out;
}

std::optional<std::vector<std::size_t>> refinement_map(const RealTree& fine, const RealTree& coarse,
                                                       const ArcFamily& coarse_fam) {
    std::vector<std::size_t> m(fine.vertices.size());
    std::vector<char> hit(coarse.vertices.size(), 0);
    for (std::size_t v = 0; v < fine.vertices.size(); ++v) {
        const auto& tv = fine.vertices[v];
        std::size_t w;
        if (tv.kind == VertexKind::Arc && tv.arc < coarse_fam.arcs.size()) {
            w = coarse.arc_vertex(tv.arc);
        } else {
            if (!coarse_fam.D.contains(tv.inside)) return std::nullopt;
            w = project(coarse, coarse_fam, tv.inside);
            if (coarse.vertices[w].kind == VertexKind::Arc) return std::nullopt;
        }
        m[v] = w;
        hit[w] = 1;
    }
    if (std::find(hit.begin(), hit.end(), char(0)) != hit.end()) return std::nullopt;
    return m;
}

}  // namespace sdiss
