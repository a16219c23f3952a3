#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sdiss/maps.hpp"
#include "sdiss/trapping.hpp"

namespace sdiss {

inline constexpr double escape_radius = 1e6;

struct OrbitSegment {
    std::vector<Point2> points;  // p_0 .. p_n
    bool overflow = false;       // stopped early because |p_i| exceeded escape_radius

    std::size_t length() const { return points.empty() ? 0 : points.size() - 1; }
    Point2 base() const { return points.front(); }
};

OrbitSegment iterate(const PlanarMap& f, Point2 p, std::size_t n);
// Largest relative defect |p_{i+1} - f(p_i)| / max(1, |f(p_i)|).
double orbit_defect(const PlanarMap& f, const OrbitSegment& seg);

struct LyapunovEstimate {
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    std::size_t n = 0;
    std::size_t burn = 0;
};

// Tangent-frame iteration with Gram-Schmidt every step. Throws NumericalError on escape.
LyapunovEstimate lyapunov(const PlanarMap& f, Point2 p, std::size_t n, std::size_t burn);

struct EmpiricalMeasure {
    std::vector<Point2> samples;  // consecutive orbit points, equal weights
    std::size_t burn = 0;

    std::size_t size() const { return samples.size(); }
    double weight() const { return samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size()); }
};

// Samples p_burn .. p_{burn+n}. Throws NumericalError on escape.
EmpiricalMeasure birkhoff_measure(const PlanarMap& f, Point2 p, std::size_t n, std::size_t burn);
// Equal-weight measure on a periodic orbit through p (q points).
EmpiricalMeasure periodic_measure(const PlanarMap& f, Point2 p, std::size_t q);

// Smallest i, then smallest n >= 1, with |p_{i+n} - p_i| < delta.
std::optional<std::pair<std::size_t, std::size_t>> find_recurrent_return(const OrbitSegment& seg, double delta);

enum class OrbitTag { Escapes, ConvergesToFixedPoint, EntersTrappingRegion, Undecided };
const char* to_string(OrbitTag t);

struct OrbitClass {
    OrbitTag tag = OrbitTag::Undecided;
    std::size_t hitting_time = 0;
};

// The fixed point of H_{a,b} with x in (-3, -1/2 - 1/a).
Point2 henon_outer_fixed_point(const HenonMap& m);
// Both fixed points (x solves a x^2 + (1 + b) x - 1 = 0, y = -b x); first has the larger x.
std::pair<Point2, Point2> henon_fixed_points(const HenonMap& m);

// Escape cone C = {|x| > |y|, |x| > 3}; trapping region S defaults to
// {|x| < 1/2 + 1/a, |y| < 1/2 - a/4}.
OrbitClass classify_orbit(const HenonMap& m, Point2 p, std::size_t maxiter);
OrbitClass classify_orbit(const HenonMap& m, Point2 p, std::size_t maxiter, const TrappingRegion& S);
bool in_escape_cone(Point2 p);

}  // namespace sdiss
