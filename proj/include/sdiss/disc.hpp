#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sdiss/geometry.hpp"
#include "sdiss/maps.hpp"
#include "sdiss/trapping.hpp"

namespace sdiss {

// Closed region bounded by a simple polygon, boundary parameterized by arclength
// (counter-clockwise).
class Disc {
public:
    Disc() = default;
    explicit Disc(Polyline boundary);

    const Polyline& boundary() const { return pts_; }
    double perimeter() const { return cum_.back(); }
    Point2 at(double s) const;
    // Parameter of the point at fraction t of edge i.
    double param(std::size_t edge, double t) const;
    bool contains(Point2 p) const;  // interior, by crossing rule
    const BBox& box() const { return box_; }
    // Boundary vertices strictly between parameters s0 and s1 (counter-clockwise, wrapping).
    Polyline between(double s0, double s1) const;

private:
    Polyline pts_;
    std::vector<double> cum_;
    BBox box_{};
};

// f^m(boundary of S), sampled adaptively: consecutive images at most h_max
// apart and turning by at most max_turn. GeometryError if the sampled curve
// is not simple or the point budget is exhausted.
Disc image_disc(const PlanarMap& f, const TrappingRegion& S, std::size_t m, double h_max = 2e-3,
                double max_turn = 0.1, std::size_t max_points = 400000);

// A curve crossing the disc with both ends on the boundary.
struct Chord {
    Polyline pts;            // pts.front() at boundary parameter sa, pts.back() at sb
    double sa = 0.0, sb = 0.0;
    double angle_a = 0.0, angle_b = 0.0;  // crossing angles with the boundary, in (0, pi/2]
};

// Component through x of (minus reversed + plus) inside D; nullopt when a
// branch ends before leaving D. x must lie inside D.
std::optional<Chord> clip_chord(const Disc& D, Point2 x, const Polyline& plus, const Polyline& minus);

struct Face {
    Polyline polygon;                 // counter-clockwise, not closed
    std::vector<std::size_t> chords;  // chords on its boundary
};

// Faces of D cut by pairwise disjoint chords (chords.size() + 1 of them).
// GeometryError when chords cross or share an endpoint.
std::vector<Face> subdivide(const Disc& D, const std::vector<Chord>& chords);

}  // namespace sdiss
