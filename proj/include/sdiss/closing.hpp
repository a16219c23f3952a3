#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sdiss/disc.hpp"
#include "sdiss/ergodic.hpp"
#include "sdiss/periodic.hpp"
#include "sdiss/pliss.hpp"
#include "sdiss/stable_manifold.hpp"
#include "sdiss/strong_dissipation.hpp"

namespace sdiss {

// ---------------------------------------------------------------------------
// one dimension

struct Orbit1D {
    double x0 = 0.0, x1 = 0.0;  // x1 = g^n(x0)
    std::size_t n = 0, k = 0;
    std::size_t period = 0;     // n k, or n when x0 itself closes up
    double p = 0.0;             // root rounded to double
    std::string root;           // root to full working precision (decimal)
    double residual = 0.0;      // |g^{nk}(root) - root| at working precision
    long precision_bits = 0;
    bool degenerate = false;    // x1 == x0
};

// Return n (|g^n(x0) - x0| < delta), first k with g^{nk}(x1) past x1, and a
// root of g^{nk}(t) = t strictly between x0 and x1. The orbit is followed in
// MPFR with enough bits to absorb sup|g'|^steps. nullopt when no return within
// max_n iterates or the orbit leaves the interval. Interval maps only.
std::optional<Orbit1D> interval_periodic_near(const Map1D& g, double x0, double delta, std::size_t max_n);

// ---------------------------------------------------------------------------
// two dimensions

struct ClosingRegion {
    Disc D;
    std::size_t m = 0;  // D = f^m(S)
    Point2 x0, x1;
    std::size_t n = 0;  // x1 = f^n(x0)
    Chord arc0, arc1;   // stable arcs through x0 and x1
    Polyline R, Dminus, Dplus;
    double diameter = 0.0;  // of R

    // closed sub-discs, boundary tolerance tol
    bool in_R(Point2 p, double tol = 1e-12) const;
    bool in_Dplus(Point2 p, double tol = 1e-12) const;
    bool in_Dminus(Point2 p, double tol = 1e-12) const;
    // 0 on arc0, 1 on arc1, interpolated in R; 1 + distance in D+, -distance in D-.
    double level(Point2 p) const;
};

inline constexpr double min_crossing_angle = 0.1;

// Cuts D along the clipped arcs of the two branch pairs. GeometryError when
// an arc does not cross D, the arcs meet, a crossing is within
// min_crossing_angle of tangential, or diam R >= delta.
ClosingRegion build_region(const Disc& D, std::size_t m, Point2 x0, std::size_t n, const StableBranchPair& b0,
                           const StableBranchPair& b1, double delta);

// Smallest k >= 1 with g^k(x0) in D+ and g^{k+1}(x0) not in D+, g = f^n.
// NumericalError when none within max_k.
std::size_t first_exit_k(const PlanarMap& f, const ClosingRegion& region, std::size_t max_k = 200);

struct RetractionResult {
    PeriodicOrbit orbit;
    std::optional<int> degree;  // winding number of F - id along the boundary of R
    bool from_quadtree = false;
    double seed_level = 0.0;
};

// Fixed point of F = f^{nk} in R minus the arcs. NumericalError with a
// diagnostic when refinement fails or the candidate leaves R.
RetractionResult retract_fixed_point(const PlanarMap& f, const ClosingRegion& region, std::size_t k);

// Winding number of F(z) - z along the closed polygon (512 samples, refined
// where the angle jumps by more than pi/4). nullopt when F(z) = z is hit or
// refinement runs out.
std::optional<int> fixed_point_degree(const PlanarMap& f, std::size_t q, const Polyline& polygon);

// Periodic orbits found so far, deduplicated, sorted by (period, x, y).
class PeriodicRegistry {
public:
    // true when the orbit was new
    bool add(const PlanarMap& f, const PeriodicOrbit& o);
    std::vector<PeriodicOrbit> orbits() const;
    std::size_t size() const;
    // distance from p to the nearest registered orbit point
    double distance(const PlanarMap& f, Point2 p) const;

private:
    mutable std::mutex mu_;
    std::vector<PeriodicOrbit> orbits_;
};

struct ClosingOptions {
    double delta = 0.05;
    CertificateConstants constants;  // for certifying x0 and x1
    SDOptions sd;                    // certificate window and branch growth
    std::size_t max_return = 2000;   // n
    std::size_t max_k = 200;
    std::size_t max_candidates = 40;  // certification attempts per sample
    std::size_t max_pairs = 8;        // (x0, x1) pairs carried to the retraction
    std::size_t max_m = 3;            // largest image disc tried
    std::size_t max_period = 400;     // n k ceiling for the refinement
    unsigned threads = 1;
};

struct ClosingSample {
    std::size_t index = 0;
    Point2 x;
    bool closed = false;
    bool degenerate = false;  // the sample itself is periodic
    PeriodicOrbit orbit;
    double distance = 0.0;    // |p - x|
    std::size_t n = 0, k = 0, m = 0;
    double region_diameter = 0.0;
    std::optional<int> degree;
    std::string note;
};

// Image discs f^m(S), m = 1..max_m (those that come out simple), and the
// starting m: the smallest whose boundary is within delta/2 of the measure
// samples in Hausdorff distance, else the largest available.
struct ClosingContext {
    std::vector<std::optional<Disc>> discs;  // index m - 1
    std::vector<double> hausdorff;           // index m - 1, inf when the disc failed
    std::size_t m0 = 0;
    bool hausdorff_met = false;
};
ClosingContext closing_context(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                               const ClosingOptions& opt);

// Full pipeline for one sample x: periodic samples close up directly;
// otherwise a certified orbit point x0 within delta/4 of x, a return
// x1 = f^n(x0) within delta/2 of x0, region, first exit k and retraction.
ClosingSample close_sample(const PlanarMap& f, const TrappingRegion& S, const ClosingContext& ctx, Point2 x,
                           const ClosingOptions& opt);

struct DensityReport {
    double delta = 0.0;
    std::vector<ClosingSample> samples;
    std::size_t closed = 0;
    double success_fraction = 0.0;   // closed / samples
    double coverage_fraction = 0.0;  // samples within delta of a registered orbit
    std::size_t max_period = 0;
    std::vector<PeriodicOrbit> orbits;
};

// `budget` evenly spaced samples of mu; each sample's forward orbit is
// generated by iteration (or read off the cycle for periodic measures).
DensityReport periodic_density_report(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                                      std::size_t budget, const ClosingOptions& opt,
                                      PeriodicRegistry* registry = nullptr);

}  // namespace sdiss
