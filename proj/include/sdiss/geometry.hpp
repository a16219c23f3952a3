#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

namespace sdiss {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
    Point2& operator-=(Point2 o) { x -= o.x; y -= o.y; return *this; }
    Point2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
    friend Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline Point2 perp(Point2 a) { return {-a.y, a.x}; }
inline Point2 normalized(Point2 a) { return a / norm(a); }

// Angle in [0, pi/2] between the lines spanned by a and b.
double line_angle(Point2 a, Point2 b);

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double s, double u) { return {s, 0.0, 0.0, u}; }

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Mat2 inverse() const;

    Point2 operator*(Point2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 operator-(const Mat2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
    double max_abs() const;

    // Singular values (largest, smallest), closed form without forming M^T M.
    std::array<double, 2> singular_values() const;
    std::array<std::complex<double>, 2> eigenvalues() const;
    double spectral_radius() const;
};

// Unit eigenvector for a real eigenvalue lambda (caller guarantees lambda is one).
Point2 eigenvector(const Mat2& m, double lambda);

using Polyline = std::vector<Point2>;

double polyline_length(const Polyline& pl);
// Cumulative arclength, s[0] = 0.
std::vector<double> arclength(const Polyline& pl);
// Point at arclength s along the polyline (clamped to the ends).
Point2 point_at_arclength(const Polyline& pl, const std::vector<double>& s, double t);

double distance_to_segment(Point2 p, Point2 a, Point2 b);
double distance_to_polyline(Point2 p, const Polyline& pl);

// Proper or touching intersection of segments [a,b] and [c,d]; returns (s,t)
// with a + s(b-a) = c + t(d-c). Parallel overlaps return nullopt.
std::optional<std::array<double, 2>> segment_intersection(Point2 a, Point2 b, Point2 c, Point2 d);

// Closed polygon given by its vertices (last vertex connects to the first).
double signed_area(const std::vector<Point2>& poly);
bool point_in_polygon(const std::vector<Point2>& poly, Point2 p);
double distance_to_polygon_boundary(const std::vector<Point2>& poly, Point2 p);
double diameter(const std::vector<Point2>& pts);

struct BBox {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool contains(Point2 p, double tol = 0.0) const {
        return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
    }
    bool overlaps(const BBox& o, double tol = 0.0) const {
        return xmin <= o.xmax + tol && o.xmin <= xmax + tol && ymin <= o.ymax + tol && o.ymin <= ymax + tol;
    }
};
BBox bounding_box(const std::vector<Point2>& pts);

// Winding number of the closed curve traced by the vectors v[0..n-1] around
// the origin, accumulating principal-angle increments. Returns nullopt if a
// vector vanishes.
std::optional<int> winding_number(const std::vector<Point2>& v);

// Self-intersection test of one polyline (adjacent segments excluded).
bool polyline_self_intersects(const Polyline& a);
// Intersection test between two polylines. If share_first is set, the two
// first segments may touch at the common start point.
bool polylines_intersect(const Polyline& a, const Polyline& b, bool share_first = false);
// Minimal distance between two polylines, or `cutoff` if it is at least that.
double polyline_distance(const Polyline& a, const Polyline& b, double cutoff);

}  // namespace sdiss
