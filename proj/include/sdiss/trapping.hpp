#pragma once

#include <vector>

#include "sdiss/geometry.hpp"
#include "sdiss/maps.hpp"

namespace sdiss {

// Open region bounded by a simple polygon (counter-clockwise after construction).
class TrappingRegion {
public:
    TrappingRegion() = default;
    explicit TrappingRegion(std::vector<Point2> vertices);

    static TrappingRegion rectangle(double xmin, double xmax, double ymin, double ymax);
    // {|x| < 1/2 + 1/a - shrink, |y| < 1/2 - a/4}
    static TrappingRegion henon_rectangle(double a, double shrink = 0.0);

    const std::vector<Point2>& vertices() const { return vertices_; }
    const BBox& box() const { return box_; }
    bool is_rectangle() const { return rect_; }

    // Strict interior membership.
    bool contains(Point2 p) const;
    // Positive inside, negative outside, magnitude = distance to the boundary.
    double signed_distance(Point2 p) const;
    double perimeter() const;
    // n points at uniform arclength, plus every vertex.
    std::vector<Point2> boundary_samples(int n) const;
    // Boundary point at arclength s (mod perimeter).
    Point2 boundary_point(double s) const;

private:
    std::vector<Point2> vertices_;
    std::vector<double> cum_;  // cumulative edge lengths
    BBox box_{};
    bool rect_ = false;
};

// min over sampled boundary points p of the signed distance of f(p) to the
// complement of S; positive iff every sampled image lies in the interior.
double trapping_check(const PlanarMap& f, const TrappingRegion& S, int n);

// A region on which the Henon map traps with positive margin: the rectangle
// {|x| < 1/2 + 1/a, |y| < 1/2 - a/4} narrowed in x when that suffices,
// otherwise a tabulated polygon. Throws ParameterError if none is known.
TrappingRegion henon_trapping_region(double a, double b);

// I x (-eps, eps) for an interval extension.
TrappingRegion extension_region(const Extension2D& f);
// Symmetric J x (-eps, eps), J = (-u, u) inside I, on which a quadratic
// extension traps with positive margin. Throws ParameterError if no u works.
TrappingRegion extension_trapping_region(const Extension2D& f);

}  // namespace sdiss
