#include "sdiss/trapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdiss/errors.hpp"

namespace sdiss {

TrappingRegion::TrappingRegion(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw ParameterError("TrappingRegion: need at least 3 vertices");
    for (auto v : vertices_)
        if (!is_finite(v)) throw ParameterError("TrappingRegion: non-finite vertex");
    if (signed_area(vertices_) < 0) std::reverse(vertices_.begin(), vertices_.end());
    if (signed_area(vertices_) <= 0) throw ParameterError("TrappingRegion: degenerate polygon");
    Polyline closed = vertices_;
    closed.push_back(vertices_.front());
    if (polyline_self_intersects(closed)) throw ParameterError("TrappingRegion: polygon is not simple");
    cum_.assign(vertices_.size() + 1, 0.0);
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        cum_[i + 1] = cum_[i] + dist(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    box_ = bounding_box(vertices_);
}

TrappingRegion TrappingRegion::rectangle(double xmin, double xmax, double ymin, double ymax) {
    if (!(xmin < xmax && ymin < ymax)) throw ParameterError("TrappingRegion::rectangle: empty rectangle");
    TrappingRegion r({{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
    r.rect_ = true;
    return r;
}

TrappingRegion TrappingRegion::henon_rectangle(double a, double shrink) {
    double X = 0.5 + 1.0 / a - shrink, Y = 0.5 - a / 4.0;
    return rectangle(-X, X, -Y, Y);
}

bool TrappingRegion::contains(Point2 p) const {
    if (rect_) return p.x > box_.xmin && p.x < box_.xmax && p.y > box_.ymin && p.y < box_.ymax;
    if (!box_.contains(p)) return false;
    return point_in_polygon(vertices_, p) && distance_to_polygon_boundary(vertices_, p) > 0.0;
}

double TrappingRegion::signed_distance(Point2 p) const {
    double d = distance_to_polygon_boundary(vertices_, p);
    bool in = rect_ ? (p.x > box_.xmin && p.x < box_.xmax && p.y > box_.ymin && p.y < box_.ymax)
                    : point_in_polygon(vertices_, p);
    return in ? d : -d;
}

double TrappingRegion::perimeter() const { return cum_.back(); }

Point2 TrappingRegion::boundary_point(double s) const {
    double L = perimeter();
    s = std::fmod(s, L);
    if (s < 0) s += L;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()) - 1, vertices_.size() - 1);
    double w = (s - cum_[i]) / (cum_[i + 1] - cum_[i]);
    Point2 a = vertices_[i], b = vertices_[(i + 1) % vertices_.size()];
    return a + w * (b - a);
}

std::vector<Point2> TrappingRegion::boundary_samples(int n) const {
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(n) + vertices_.size());
    for (int i = 0; i < n; ++i) out.push_back(boundary_point(perimeter() * i / n));
    out.insert(out.end(), vertices_.begin(), vertices_.end());
    return out;
}

double trapping_check(const PlanarMap& f, const TrappingRegion& S, int n) {
    if (n < 4) throw ParameterError("trapping_check: need n >= 4 boundary samples");
    double margin = std::numeric_limits<double>::infinity();
    for (auto p : S.boundary_samples(n)) margin = std::min(margin, S.signed_distance(apply(f, p)));
    return margin;
}

namespace {

struct TabulatedRegion {
    double a, b;
    std::vector<Point2> vertices;
};

// Polygons obtained by maximizing the sampled trapping margin; no centred
// rectangle traps for these parameters.
const std::vector<TabulatedRegion>& tabulated() {
    static const std::vector<TabulatedRegion> table = {
        {1.4, 0.2,
         {{1.2011, -0.0065}, {1.1421, 0.262}, {0.2365, 0.1872}, {-0.1379, 0.19}, {-0.8896, 0.2248},
          {-0.9, -0.0065}, {-1.061, -0.2799}, {-0.3088, -0.381}, {0.4008, -0.3713}, {1.0055, -0.2414}}},
        {1.4, -0.2,
         {{1.2519, -0.0299}, {1.3012, 0.375}, {0.2257, 0.2067}, {-0.1388, 0.2347}, {-1.3287, 0.4188},
          {-1.1557, -0.0299}, {-1.0468, -0.387}, {-0.2876, -0.499}, {0.2962, -0.3634}, {1.079, -0.3627}}},
    };
    return table;
}

}  // namespace

TrappingRegion henon_trapping_region(double a, double b) {
    HenonMap m{a, b};
    for (double shrink : {0.02, 0.01, 0.03, 0.005, 0.04}) {
        if (0.5 + 1.0 / a - shrink <= 0 || 0.5 - a / 4.0 <= 0) break;
        auto S = TrappingRegion::henon_rectangle(a, shrink);
        if (trapping_check(m, S, 4000) > 1e-3) return S;
    }
    for (const auto& t : tabulated()) {
        if (std::abs(t.a - a) < 1e-12 && std::abs(t.b - b) < 1e-12) {
            TrappingRegion S(t.vertices);
            if (trapping_check(m, S, 4000) > 0) return S;
        }
    }
    throw ParameterError("no trapping region known for this Henon map");
}

TrappingRegion extension_region(const Extension2D& f) {
    if (is_circle(f.h)) throw ParameterError("extension_region: circle maps have no interval region");
    Interval I = domain(f.h);
    return TrappingRegion::rectangle(I.lo, I.hi, -f.eps, f.eps);
}

TrappingRegion extension_trapping_region(const Extension2D& f) {
    auto q = std::get_if<QuadraticMap>(&f.h);
    if (!q) throw ParameterError("extension_trapping_region: only quadratic h is supported");
    // J = (-u, u) needs u > eps - c (left end below c - eps) and u^2 + c + eps < u
    // (right corner maps inside); both are required with some slack for |b| y.
    double c = q->c, eps = f.eps;
    double lo = eps - c, disc = 1.0 - 4.0 * (c + eps);
    if (disc <= 0) throw ParameterError("extension_trapping_region: no trapping interval");
    double hi = 0.5 * (1.0 + std::sqrt(disc));
    hi = std::min(hi, -c / 2 + 1);
    if (!(lo < hi)) throw ParameterError("extension_trapping_region: eps too large for this c");
    auto S = TrappingRegion::rectangle(-0.5 * (lo + hi), 0.5 * (lo + hi), -eps, eps);
    if (trapping_check(f, S, 4000) <= 0) throw ParameterError("extension_trapping_region: margin not positive");
    return S;
}

}  // namespace sdiss
