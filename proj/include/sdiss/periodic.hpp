#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "sdiss/maps.hpp"
#include "sdiss/trapping.hpp"

namespace sdiss {

struct PeriodicOrbit {
    Point2 p;
    std::size_t q = 0;
    double residual = 0.0;  // |f^q(p) - p| by plain iteration
    std::array<std::complex<double>, 2> multipliers{};

    bool saddle() const;  // |mu_1| < 1 < |mu_2|
    bool sink() const;    // both |mu| < 1
};

// Smallest divisor q' of q with |f^{q'}(p) - p| < tol.
std::size_t minimal_period(const PlanarMap& f, Point2 p, std::size_t q, double tol = 1e-6);

// Residual by plain iteration, multipliers of Df^q, period reduced to the minimal one.
PeriodicOrbit describe_orbit(const PlanarMap& f, Point2 p, std::size_t q);

struct NewtonOptions {
    int max_iter = 60;
    double tol = 1e-15;       // shooting residual
    double accept = 1e-8;     // plain-iteration residual required of the result
};

// Multiple-shooting Newton for f^q(p) = p seeded with the pseudo-orbit
// `guess` (q points) or, if guess has a single point, its forward orbit.
std::optional<PeriodicOrbit> newton_periodic(const PlanarMap& f, std::vector<Point2> guess, std::size_t q,
                                             const NewtonOptions& opt = {});
// The refined cycle itself (shooting residual below tol, or below accept).
std::optional<std::vector<Point2>> newton_cycle(const PlanarMap& f, std::vector<Point2> guess, std::size_t q,
                                               const NewtonOptions& opt = {});

// Newton from every point of a (grid_n x grid_n) grid over S for each period
// 1..max_q; distinct orbits inside S with minimal period, sorted by (q, x, y)
// of their lexicographically smallest point.
std::vector<PeriodicOrbit> find_periodic_orbits(const PlanarMap& f, const TrappingRegion& S, std::size_t max_q,
                                                int grid_n);

// Canonical representative of an orbit: its lexicographically smallest point.
Point2 orbit_representative(const PlanarMap& f, Point2 p, std::size_t q);

}  // namespace sdiss
