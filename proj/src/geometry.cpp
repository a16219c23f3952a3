#include "sdiss/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace sdiss {

double line_angle(Point2 a, Point2 b) {
    double c = std::abs(dot(a, b)) / (norm(a) * norm(b));
    double s = std::abs(cross(a, b)) / (norm(a) * norm(b));
    return std::atan2(s, c);
}

Mat2 Mat2::inverse() const {
    double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

double Mat2::max_abs() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
}

std::array<double, 2> Mat2::singular_values() const {
    double e = 0.5 * (a11 + a22), f = 0.5 * (a11 - a22);
    double g = 0.5 * (a21 + a12), h = 0.5 * (a21 - a12);
    double q = std::hypot(e, h), r = std::hypot(f, g);
    return {q + r, std::abs(q - r)};
}

std::array<std::complex<double>, 2> Mat2::eigenvalues() const {
    double t = 0.5 * trace();
    double disc = t * t - det();
    if (disc >= 0) {
        double s = std::sqrt(disc);
        // avoid cancellation: larger root first, the other from the product
        double l1 = t >= 0 ? t + s : t - s;
        double l2 = l1 != 0.0 ? det() / l1 : 0.0;
        if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
        return {std::complex<double>(l1, 0.0), std::complex<double>(l2, 0.0)};
    }
    double s = std::sqrt(-disc);
    return {std::complex<double>(t, s), std::complex<double>(t, -s)};
}

double Mat2::spectral_radius() const {
    auto ev = eigenvalues();
    return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

Point2 eigenvector(const Mat2& m, double lambda) {
    // rows of (m - lambda I); pick the better-conditioned one
    Point2 r1{m.a11 - lambda, m.a12}, r2{m.a21, m.a22 - lambda};
    Point2 r = norm(r1) >= norm(r2) ? r1 : r2;
    if (norm(r) == 0.0) return {1.0, 0.0};
    return normalized(Point2{-r.y, r.x});
}

double polyline_length(const Polyline& pl) {
    double s = 0.0;
    for (std::size_t i = 1; i < pl.size(); ++i) s += dist(pl[i - 1], pl[i]);
    return s;
}

std::vector<double> arclength(const Polyline& pl) {
    std::vector<double> s(pl.size(), 0.0);
    for (std::size_t i = 1; i < pl.size(); ++i) s[i] = s[i - 1] + dist(pl[i - 1], pl[i]);
    return s;
}

Point2 point_at_arclength(const Polyline& pl, const std::vector<double>& s, double t) {
    if (pl.empty()) return {};
    if (t <= s.front()) return pl.front();
    if (t >= s.back()) return pl.back();
    auto it = std::upper_bound(s.begin(), s.end(), t);
    std::size_t i = static_cast<std::size_t>(it - s.begin());
    double w = (t - s[i - 1]) / (s[i] - s[i - 1]);
    return pl[i - 1] + w * (pl[i] - pl[i - 1]);
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
    Point2 d = b - a;
    double l2 = dot(d, d);
    if (l2 == 0.0) return dist(p, a);
    double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
    return dist(p, a + t * d);
}

double distance_to_polyline(Point2 p, const Polyline& pl) {
    if (pl.size() == 1) return dist(p, pl[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pl.size(); ++i) best = std::min(best, distance_to_segment(p, pl[i - 1], pl[i]));
    return best;
}

std::optional<std::array<double, 2>> segment_intersection(Point2 a, Point2 b, Point2 c, Point2 d) {
    Point2 r = b - a, s = d - c;
    double den = cross(r, s);
    if (den == 0.0) return std::nullopt;
    Point2 ac = c - a;
    double t = cross(ac, s) / den;
    double u = cross(ac, r) / den;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return std::array<double, 2>{t, u};
}

double signed_area(const std::vector<Point2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

bool point_in_polygon(const std::vector<Point2>& poly, Point2 p) {
    bool inside = false;
    for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
        const Point2 &a = poly[i], &b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xi) inside = !inside;
        }
    }
    return inside;
}

double distance_to_polygon_boundary(const std::vector<Point2>& poly, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i)
        best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
    return best;
}

double diameter(const std::vector<Point2>& pts) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, dist(pts[i], pts[j]));
    return d;
}

BBox bounding_box(const std::vector<Point2>& pts) {
    BBox b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (auto p : pts) {
        b.xmin = std::min(b.xmin, p.x);
        b.xmax = std::max(b.xmax, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

std::optional<int> winding_number(const std::vector<Point2>& v) {
    double total = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        Point2 a = v[i], b = v[(i + 1) % n];
        if (norm(a) == 0.0) return std::nullopt;
        total += std::atan2(cross(a, b), dot(a, b));
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

namespace {

struct SegBox {
    BBox box;
    std::size_t idx;
};

std::vector<SegBox> segment_boxes(const Polyline& a, double tol) {
    std::vector<SegBox> out;
    if (a.size() < 2) return out;
    out.reserve(a.size() - 1);
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        BBox b = bounding_box({a[i], a[i + 1]});
        b.xmin -= tol; b.xmax += tol; b.ymin -= tol; b.ymax += tol;
        out.push_back({b, i});
    }
    std::sort(out.begin(), out.end(), [](const SegBox& l, const SegBox& r) { return l.box.xmin < r.box.xmin; });
    return out;
}

// Calls fn(i, j) for every pair (segment i of a, segment j of b) whose boxes
// overlap; fn returns true to stop early. Classic sweep over xmin with active lists.
template <class Fn>
bool sweep_pairs(const std::vector<SegBox>& sa, const std::vector<SegBox>& sb, Fn fn) {
    std::vector<const SegBox*> act_a, act_b;
    std::size_t ia = 0, ib = 0;
    auto prune = [](std::vector<const SegBox*>& act, double x) {
        std::erase_if(act, [x](const SegBox* s) { return s->box.xmax < x; });
    };
    while (ia < sa.size() || ib < sb.size()) {
        bool take_a = ib >= sb.size() || (ia < sa.size() && sa[ia].box.xmin <= sb[ib].box.xmin);
        if (take_a) {
            const SegBox& cur = sa[ia++];
            prune(act_b, cur.box.xmin);
            for (const SegBox* o : act_b)
                if (cur.box.overlaps(o->box) && fn(cur.idx, o->idx)) return true;
            act_a.push_back(&cur);
        } else {
            const SegBox& cur = sb[ib++];
            prune(act_a, cur.box.xmin);
            for (const SegBox* o : act_a)
                if (cur.box.overlaps(o->box) && fn(o->idx, cur.idx)) return true;
            act_b.push_back(&cur);
        }
    }
    return false;
}

// The sweep runs along x; polylines that are mostly vertical are transposed first.
bool tall(const Polyline& a, const Polyline& b) {
    BBox ba = bounding_box(a), bb = bounding_box(b);
    double w = std::max(ba.xmax, bb.xmax) - std::min(ba.xmin, bb.xmin);
    double h = std::max(ba.ymax, bb.ymax) - std::min(ba.ymin, bb.ymin);
    return h > w;
}

Polyline transposed(const Polyline& a) {
    Polyline t(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) t[i] = {a[i].y, a[i].x};
    return t;
}

}  // namespace

bool polyline_self_intersects(const Polyline& a_in) {
    if (a_in.size() < 4) return false;
    Polyline tmp;
    const Polyline* ap = &a_in;
    if (tall(a_in, a_in)) { tmp = transposed(a_in); ap = &tmp; }
    const Polyline& a = *ap;
    auto boxes = segment_boxes(a, 0.0);
    const std::size_t last = a.size() - 2;
    const bool closed = a.front() == a.back();  // first and last segment share the closing vertex
    std::vector<const SegBox*> act;
    for (const auto& cur : boxes) {
        std::erase_if(act, [&](const SegBox* s) { return s->box.xmax < cur.box.xmin; });
        for (const SegBox* o : act) {
            std::size_t p = cur.idx, q = o->idx;
            if (p + 1 == q || q + 1 == p) continue;
            if (closed && ((p == 0 && q == last) || (q == 0 && p == last))) continue;
            if (!cur.box.overlaps(o->box)) continue;
            if (segment_intersection(a[p], a[p + 1], a[q], a[q + 1])) return true;
        }
        act.push_back(&cur);
    }
    return false;
}

bool polylines_intersect(const Polyline& a_in, const Polyline& b_in, bool share_first) {
    if (a_in.size() < 2 || b_in.size() < 2) return false;
    bool t = tall(a_in, b_in);
    Polyline ta, tb;
    if (t) { ta = transposed(a_in); tb = transposed(b_in); }
    const Polyline& a = t ? ta : a_in;
    const Polyline& b = t ? tb : b_in;
    auto sa = segment_boxes(a, 0.0), sb = segment_boxes(b, 0.0);
    return sweep_pairs(sa, sb, [&](std::size_t i, std::size_t j) {
        if (share_first && i == 0 && j == 0) return false;
        auto hit = segment_intersection(a[i], a[i + 1], b[j], b[j + 1]);
        if (!hit) return false;
        if (share_first && ((i == 0 && (*hit)[0] == 0.0) || (j == 0 && (*hit)[1] == 0.0))) return false;
        return true;
    });
}

double polyline_distance(const Polyline& a_in, const Polyline& b_in, double cutoff) {
    double best = cutoff;
    if (a_in.size() < 2 || b_in.size() < 2) {
        for (auto p : a_in) best = std::min(best, distance_to_polyline(p, b_in));
        for (auto p : b_in) best = std::min(best, distance_to_polyline(p, a_in));
        return best;
    }
    bool t = tall(a_in, b_in);
    Polyline ta, tb;
    if (t) { ta = transposed(a_in); tb = transposed(b_in); }
    const Polyline& a = t ? ta : a_in;
    const Polyline& b = t ? tb : b_in;
    auto sa = segment_boxes(a, cutoff), sb = segment_boxes(b, cutoff);
    sweep_pairs(sa, sb, [&](std::size_t i, std::size_t j) {
        if (segment_intersection(a[i], a[i + 1], b[j], b[j + 1])) {
            best = 0.0;
            return true;
        }
        double d = std::min({distance_to_segment(a[i], b[j], b[j + 1]), distance_to_segment(a[i + 1], b[j], b[j + 1]),
                             distance_to_segment(b[j], a[i], a[i + 1]), distance_to_segment(b[j + 1], a[i], a[i + 1])});
        best = std::min(best, d);
        return false;
    });
    return best;
}

}  // namespace sdiss
