#include "sdiss/disc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdiss/errors.hpp"

namespace sdiss {

Disc::Disc(Polyline boundary) : pts_(std::move(boundary)) {
    if (pts_.size() >= 2 && pts_.front() == pts_.back()) pts_.pop_back();
    if (pts_.size() < 3) throw GeometryError("Disc: need at least 3 boundary points");
    if (signed_area(pts_) < 0) std::reverse(pts_.begin(), pts_.end());
    Polyline closed = pts_;
    closed.push_back(pts_.front());
    if (polyline_self_intersects(closed)) throw GeometryError("Disc: boundary is not a simple curve");
    cum_.assign(pts_.size() + 1, 0.0);
    for (std::size_t i = 0; i < pts_.size(); ++i) cum_[i + 1] = cum_[i] + dist(pts_[i], pts_[(i + 1) % pts_.size()]);
    box_ = bounding_box(pts_);
}

Point2 Disc::at(double s) const {
    double L = perimeter();
    s = std::fmod(s, L);
    if (s < 0) s += L;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()) - 1, pts_.size() - 1);
    double len = cum_[i + 1] - cum_[i];
    double w = len > 0 ? (s - cum_[i]) / len : 0.0;
    return pts_[i] + w * (pts_[(i + 1) % pts_.size()] - pts_[i]);
}

double Disc::param(std::size_t edge, double t) const { return cum_[edge] + t * (cum_[edge + 1] - cum_[edge]); }

bool Disc::contains(Point2 p) const { return box_.contains(p) && point_in_polygon(pts_, p); }

Polyline Disc::between(double s0, double s1) const {
    Polyline out;
    const std::size_t n = pts_.size();
    auto first_after = [&](double s) {
        return static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.begin() + static_cast<std::ptrdiff_t>(n), s) -
                                        cum_.begin());
    };
    if (s0 <= s1) {
        for (std::size_t i = first_after(s0); i < n && cum_[i] < s1; ++i) out.push_back(pts_[i]);
    } else {
        for (std::size_t i = first_after(s0); i < n; ++i) out.push_back(pts_[i]);
        for (std::size_t i = 0; i < n && cum_[i] < s1; ++i) out.push_back(pts_[i]);
    }
    return out;
}

Disc image_disc(const PlanarMap& f, const TrappingRegion& S, std::size_t m, double h_max, double max_turn,
                std::size_t max_points) {
    struct Sample {
        double s;
        Point2 p;
    };
    const double P = S.perimeter();
    auto img = [&](double s) { return Sample{s, iterate_point(f, S.boundary_point(s), m)}; };
    std::vector<double> params;
    const int init = 4096;
    for (int i = 0; i < init; ++i) params.push_back(P * i / init);
    {
        double acc = 0.0;
        const auto& v = S.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) {
            params.push_back(acc);
            acc += dist(v[i], v[(i + 1) % v.size()]);
        }
    }
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end()), params.end());
    std::vector<Sample> pts;
    for (double s : params) pts.push_back(img(s));

    auto turn = [](Point2 a, Point2 b, Point2 c) {
        Point2 u = b - a, v = c - b;
        if (norm(u) == 0 || norm(v) == 0) return 0.0;
        return std::atan2(std::abs(cross(u, v)), dot(u, v));
    };
    for (int pass = 0; pass < 80; ++pass) {
        const std::size_t n = pts.size();
        std::vector<char> split(n, 0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const Sample& a = pts[i];
            const Sample& b = pts[(i + 1) % n];
            double gap = (i + 1 < n) ? b.s - a.s : P - a.s + b.s;
            if (gap < 1e-13 * P) continue;
            bool need = dist(a.p, b.p) > h_max;
            if (!need) {
                const Sample& z = pts[(i + n - 1) % n];
                const Sample& c = pts[(i + 2) % n];
                need = turn(z.p, a.p, b.p) > max_turn || turn(a.p, b.p, c.p) > max_turn;
            }
            if (need) {
                split[i] = 1;
                ++count;
            }
        }
        if (count == 0) break;
        if (n + count > max_points) throw GeometryError("image_disc: point budget exhausted");
        std::vector<Sample> next;
        next.reserve(n + count);
        for (std::size_t i = 0; i < n; ++i) {
            next.push_back(pts[i]);
            if (split[i]) {
                double s0 = pts[i].s, s1 = (i + 1 < n) ? pts[i + 1].s : P + pts[0].s;
                double mid = 0.5 * (s0 + s1);
                if (mid >= P) mid -= P;
                next.push_back(img(mid));
            }
        }
        if (next.back().s < next[next.size() - 2].s) {  // a wrapped midpoint belongs at the front
            Sample w = next.back();
            next.pop_back();
            next.insert(next.begin(), w);
        }
        pts = std::move(next);
    }
    Polyline poly;
    poly.reserve(pts.size());
    for (const auto& s : pts)
        if (poly.empty() || !(s.p == poly.back())) poly.push_back(s.p);
    return Disc(std::move(poly));
}

namespace {

// Uniform grid over the boundary edges of a disc.
class EdgeGrid {
public:
    explicit EdgeGrid(const Disc& D) : pts_(D.boundary()) {
        box_ = D.box();
        std::size_t n = pts_.size();
        g_ = std::max<int>(1, static_cast<int>(std::sqrt(static_cast<double>(n)) / 2));
        w_ = std::max((box_.xmax - box_.xmin) / g_, 1e-300);
        h_ = std::max((box_.ymax - box_.ymin) / g_, 1e-300);
        cells_.resize(static_cast<std::size_t>(g_) * static_cast<std::size_t>(g_));
        for (std::size_t i = 0; i < n; ++i) {
            Point2 a = pts_[i], b = pts_[(i + 1) % n];
            visit(std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y),
                  [&](std::vector<std::size_t>& c) { c.push_back(i); });
        }
    }

    // Earliest crossing of segment [p, q] with the boundary: (t along pq, edge, u along edge).
    struct Hit {
        double t;
        std::size_t edge;
        double u;
    };
    std::optional<Hit> first_hit(Point2 p, Point2 q) const {
        std::optional<Hit> best;
        const std::size_t n = pts_.size();
        visit_const(std::min(p.x, q.x), std::max(p.x, q.x), std::min(p.y, q.y), std::max(p.y, q.y),
                    [&](const std::vector<std::size_t>& c) {
                        for (std::size_t e : c) {
                            auto hit = segment_intersection(p, q, pts_[e], pts_[(e + 1) % n]);
                            if (hit && (!best || (*hit)[0] < best->t)) best = Hit{(*hit)[0], e, (*hit)[1]};
                        }
                    });
        return best;
    }

private:
    template <class Fn>
    void visit(double x0, double x1, double y0, double y1, Fn fn) {
        auto [i0, i1, j0, j1] = range(x0, x1, y0, y1);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j) fn(cells_[static_cast<std::size_t>(i * g_ + j)]);
    }
    template <class Fn>
    void visit_const(double x0, double x1, double y0, double y1, Fn fn) const {
        if (x1 < box_.xmin || x0 > box_.xmax || y1 < box_.ymin || y0 > box_.ymax) return;
        auto [i0, i1, j0, j1] = range(x0, x1, y0, y1);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j) fn(cells_[static_cast<std::size_t>(i * g_ + j)]);
    }
    std::array<int, 4> range(double x0, double x1, double y0, double y1) const {
        auto cx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - box_.xmin) / w_)), 0, g_ - 1); };
        auto cy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - box_.ymin) / h_)), 0, g_ - 1); };
        return {cx(x0), cx(x1), cy(y0), cy(y1)};
    }

    const Polyline& pts_;
    BBox box_{};
    int g_ = 1;
    double w_ = 1, h_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
};

double crossing_angle(Point2 a, Point2 b, Point2 c, Point2 d) {
    Point2 u = b - a, v = d - c;
    double s = std::abs(cross(u, v)) / (norm(u) * norm(v));
    return std::asin(std::min(1.0, s));
}

}  // namespace

std::optional<Chord> clip_chord(const Disc& D, Point2 x, const Polyline& plus, const Polyline& minus) {
    if (!D.contains(x)) throw DomainError("clip_chord: base point outside the disc");
    EdgeGrid grid(D);
    const std::size_t n = D.boundary().size();
    struct End {
        Polyline pts;  // from x outward, ending on the boundary
        double s;
        double angle;
    };
    auto walk = [&](const Polyline& br) -> std::optional<End> {
        End e;
        e.pts.push_back(x);
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            auto hit = grid.first_hit(br[i], br[i + 1]);
            if (hit) {
                Point2 c = br[i] + hit->t * (br[i + 1] - br[i]);
                if (!(c == e.pts.back())) e.pts.push_back(c);
                e.s = D.param(hit->edge, hit->u);
                e.angle = crossing_angle(br[i], br[i + 1], D.boundary()[hit->edge], D.boundary()[(hit->edge + 1) % n]);
                return e;
            }
            if (!(br[i + 1] == e.pts.back())) e.pts.push_back(br[i + 1]);
        }
        return std::nullopt;
    };
    auto p = walk(plus), m = walk(minus);
    if (!p || !m) return std::nullopt;
    Chord c;
    c.pts.assign(m->pts.rbegin(), m->pts.rend());
    c.pts.insert(c.pts.end(), p->pts.begin() + 1, p->pts.end());
    c.sa = m->s;
    c.sb = p->s;
    c.angle_a = m->angle;
    c.angle_b = p->angle;
    return c;
}

std::vector<Face> subdivide(const Disc& D, const std::vector<Chord>& chords) {
    const std::size_t c = chords.size();
    if (c == 0) return {Face{D.boundary(), {}}};
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = i + 1; j < c; ++j)
            if (polylines_intersect(chords[i].pts, chords[j].pts))
                throw GeometryError("subdivide: chords " + std::to_string(i) + " and " + std::to_string(j) + " cross");

    struct EndPt {
        double s;
        std::size_t chord;
        int end;  // 0: front (sa), 1: back (sb)
    };
    std::vector<EndPt> ends;
    for (std::size_t i = 0; i < c; ++i) {
        ends.push_back({chords[i].sa, i, 0});
        ends.push_back({chords[i].sb, i, 1});
    }
    std::sort(ends.begin(), ends.end(), [](const EndPt& a, const EndPt& b) { return a.s < b.s; });
    for (std::size_t k = 0; k < ends.size(); ++k)
        if (ends[k].s == ends[(k + 1) % ends.size()].s) throw GeometryError("subdivide: chords share an endpoint");

    // non-crossing chords read as balanced parentheses from any start
    {
        std::vector<std::size_t> stack;
        std::vector<char> open(c, 0);
        for (const auto& e : ends) {
            if (!open[e.chord]) {
                open[e.chord] = 1;
                stack.push_back(e.chord);
            } else {
                if (stack.empty() || stack.back() != e.chord) throw GeometryError("subdivide: chord endpoints interleave");
                stack.pop_back();
            }
        }
    }
    const std::size_t E = ends.size();
    std::vector<std::size_t> pos(2 * c);
    for (std::size_t k = 0; k < E; ++k) pos[2 * ends[k].chord + static_cast<std::size_t>(ends[k].end)] = k;

    std::vector<char> used(E, 0);
    std::vector<Face> faces;
    for (std::size_t start = 0; start < E; ++start) {
        if (used[start]) continue;
        Face face;
        std::size_t k = start;
        std::size_t guard = 0;
        while (!used[k]) {
            if (++guard > 2 * E + 2) throw GeometryError("subdivide: face traversal did not close");
            used[k] = 1;
            // boundary piece from ends[k] to ends[k+1]
            const EndPt& a = ends[k];
            const EndPt& b = ends[(k + 1) % E];
            face.polygon.push_back(D.at(a.s));
            auto mid = D.between(a.s, b.s);
            face.polygon.insert(face.polygon.end(), mid.begin(), mid.end());
            // along the chord from b to its partner
            const Chord& ch = chords[b.chord];
            if (b.end == 0) {
                face.polygon.insert(face.polygon.end(), ch.pts.begin(), ch.pts.end() - 1);
            } else {
                face.polygon.insert(face.polygon.end(), ch.pts.rbegin(), ch.pts.rend() - 1);
            }
            face.chords.push_back(b.chord);
            k = pos[2 * b.chord + static_cast<std::size_t>(1 - b.end)];
        }
        std::sort(face.chords.begin(), face.chords.end());
        face.chords.erase(std::unique(face.chords.begin(), face.chords.end()), face.chords.end());
        faces.push_back(std::move(face));
    }
    if (faces.size() != c + 1)
        throw GeometryError("subdivide: expected " + std::to_string(c + 1) + " faces, found " + std::to_string(faces.size()));
    return faces;
}

}  // namespace sdiss
