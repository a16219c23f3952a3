#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdiss/ergodic.hpp"
#include "sdiss/periodic.hpp"
#include "sdiss/pliss.hpp"
#include "sdiss/stable_manifold.hpp"
#include "sdiss/trapping.hpp"

namespace sdiss {

struct DissipationReport {
    double sup_det = 0.0;          // sup |det Df| over the grid
    double inf_conorm_pow = 0.0;   // inf of (smallest singular value)^{9/10}
    double inf_angles_pow = 0.0;   // same infimum from 64 sampled directions (cross-check)
    double margin = 0.0;           // inf_conorm_pow - sup_det
    int grid_n = 0;
    bool holds() const { return margin > 0.0; }
};

// Grid points i/grid_n of the bounding box that lie in the closure of S.
DissipationReport check_dissipation2(const PlanarMap& f, const TrappingRegion& S, int grid_n);

// Period q when the samples trace a cycle (f closes it and samples repeat
// with period q, both to within tol).
std::optional<std::size_t> measure_cycle(const PlanarMap& f, const EmpiricalMeasure& mu, std::size_t max_q = 64,
                                         double tol = 1e-9);

// Sink-supported measure: a cycle on which Df^q has spectral radius < 1.
struct SinkInfo {
    std::size_t period = 0;
    double spectral_radius = 0.0;
};
std::optional<SinkInfo> sink_support(const PlanarMap& f, const EmpiricalMeasure& mu, std::size_t max_q = 64,
                                     double tol = 1e-9);

struct SDOptions {
    std::size_t N = 50;          // certificate window
    std::size_t n_back = 40;     // backward steps for direction estimates
    std::size_t sample_k = 100;  // samples drawn (evenly spaced) from the measure
    double eps_chart = 1e-3;
    CurveOptions curve;
    GrowOptions grow;
    unsigned threads = 1;
};

struct SDSample {
    std::size_t index = 0;  // position in the measure
    Point2 p;
    bool certified = false;
    bool decided = false;   // curve construction succeeded
    bool exit_plus = false, exit_minus = false;
    double r0 = 0.0;
    double length_plus = 0.0, length_minus = 0.0;
    std::size_t pullbacks = 0;
    std::string note;
};

struct SDVerdict {
    std::vector<SDSample> samples;
    std::size_t certified = 0, decided = 0, undecided = 0, both_exit = 0;
    bool sink_supported = false;
    bool vacuous = false;     // nothing certified
    double fraction = 0.0;    // both_exit / decided
};

// Certificate, chart sequence, local curve and grown branches at orbit.points[0].
struct BranchAttempt {
    bool certified = false;
    std::optional<StableBranchPair> branches;  // set when decided
    double r0 = 0.0;
    std::string note;
};
// Orbit points needed past the base point (length of the segment).
std::size_t orbit_need(const SDOptions& opt);
BranchAttempt branches_at(const PlanarMap& f, const TrappingRegion& S, const OrbitSegment& orbit,
                          const CertificateConstants& c, const SDOptions& opt);

SDVerdict verify_strong_dissipation(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                                    const CertificateConstants& c, const SDOptions& opt = {});

// Share of the drawn samples that are certified and have both branches exiting.
double estimate_Xg(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                   const CertificateConstants& c, const SDOptions& opt = {});
double estimate_Xg(const SDVerdict& v);

// The verifier run on the equidistributed measure of every periodic orbit
// found in S (find_periodic_orbits(f, S, max_q, grid_n)), each with constants
// lyapunov_constants(log|mu_s|/q, max(log|mu_u|/q, 0), eps). Sink orbits come
// back vacuous. Counts are pooled over the orbits.
struct OrbitVerdict {
    PeriodicOrbit orbit;
    double lambda_minus = 0.0, lambda_plus = 0.0;
    SDVerdict verdict;
};
struct PooledVerdict {
    std::vector<OrbitVerdict> orbits;
    std::size_t certified = 0, decided = 0, undecided = 0, both_exit = 0;
    double fraction = 0.0;  // both_exit / decided
};
PooledVerdict verify_on_periodic_orbits(const PlanarMap& f, const TrappingRegion& S, std::size_t max_q, int grid_n,
                                        double eps, const SDOptions& opt = {});

// Indices drawn by verify_strong_dissipation: evenly spaced, k of them (all if k >= size).
std::vector<std::size_t> sample_indices(std::size_t size, std::size_t k);

}  // namespace sdiss
