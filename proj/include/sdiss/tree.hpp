#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdiss/disc.hpp"
#include "sdiss/ergodic.hpp"
#include "sdiss/pliss.hpp"
#include "sdiss/strong_dissipation.hpp"

namespace sdiss {

namespace detail {
class Locator;
}

inline constexpr double arc_tolerance = 1e-9;

struct ArcFamily {
    Disc D;
    std::vector<Chord> arcs;
    // index of the arc this one is a preimage component of; nullopt for seeds
    std::vector<std::optional<std::size_t>> parent;
    std::vector<Point2> base;  // a point of the arc (seed point or preimage anchor)
    std::size_t seeds = 0;
    std::size_t discarded = 0;  // colliding candidates dropped
    std::size_t rounds = 0;     // preimage rounds performed

    std::size_t size() const { return arcs.size(); }
    // min polyline distance, capped at 1 (0 on the diagonal)
    std::vector<std::vector<double>> distances() const;
};

// Adds `arc` unless it comes within arc_tolerance of an arc already present.
// Returns the new index, or nullopt when discarded (the count is kept).
std::optional<std::size_t> add_arc(ArcFamily& fam, Chord arc, Point2 base, std::optional<std::size_t> parent);

struct ArcOptions {
    SDOptions sd;
    std::size_t preimage_rounds = 1;
    double h_max = 2e-3;  // segment bound for preimage curves
    bool meet_image = true;  // keep only preimage components meeting f(D)
};

// A candidate base point with its forward orbit and certificate constants.
struct ArcSeed {
    OrbitSegment orbit;  // orbit.points[0] is the base point
    CertificateConstants constants;
};

// Forward orbits by iteration, long enough for branches_at.
std::vector<ArcSeed> seeds_from_points(const PlanarMap& f, const std::vector<Point2>& points,
                                       const CertificateConstants& c, const SDOptions& sd);
// Every point of a periodic cycle (cycle[i + 1] = f(cycle[i])), orbit read off the cycle.
std::vector<ArcSeed> seeds_from_cycle(const std::vector<Point2>& cycle, const CertificateConstants& c,
                                      const SDOptions& sd);

// Seeds arcs from the branches of certified seeds (in order) until n_arcs are
// in, then runs the preimage rounds. GeometryError when fewer than 2 arcs result.
ArcFamily collect_arcs(const PlanarMap& f, const TrappingRegion& S, const Disc& D, std::size_t n_arcs,
                       const std::vector<ArcSeed>& seeds, const ArcOptions& opt);

// One round: for every arc in [from, size()), the components of f^-1(arc)
// inside D that cross D (and meet f(D) when meet_image is set) are offered to
// the family. Returns the number added.
std::size_t preimage_round(const PlanarMap& f, ArcFamily& fam, std::size_t from, double h_max = 2e-3,
                           bool meet_image = true);

// Repeats preimage rounds until nothing new is added or max_rounds.
// Returns true when the family came out closed.
bool close_under_preimages(const PlanarMap& f, ArcFamily& fam, std::size_t max_rounds, double h_max = 2e-3,
                           bool meet_image = true);

enum class VertexKind { Component, Arc };

struct TreeVertex {
    VertexKind kind = VertexKind::Component;
    Polyline polygon;  // components only
    BBox box{};
    std::size_t arc = 0;  // arc vertices only
    Point2 inside;        // a point of the vertex away from its boundary
};

struct RealTree {
    std::vector<TreeVertex> vertices;  // components first, then one vertex per arc
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (component, arc)
    std::vector<std::vector<std::size_t>> adj;
    std::size_t components = 0;
    std::shared_ptr<const detail::Locator> index;

    std::size_t arc_vertex(std::size_t arc) const { return components + arc; }
    // edge-count metric
    std::size_t distance(std::size_t u, std::size_t v) const;
};

// Components of D minus the arcs and their incidence with the arcs. Throws
// GeometryError when the incidence graph has a cycle or is disconnected.
RealTree build_tree(const ArcFamily& fam);

// Vertex of p: the arc vertex when p is within arc_tolerance of an arc,
// otherwise the component containing p. DomainError when p is outside D.
std::size_t project(const RealTree& tree, const ArcFamily& fam, Point2 p);

struct TreeMap {
    std::vector<std::size_t> h;
    std::vector<char> flagged;               // samples of v landed in more than one vertex
    std::vector<std::size_t> escaped;        // samples of v whose image left D
    std::size_t flags() const;
};

// h(v) = most frequent vertex among the projections of f at `samples` points of
// v (ties to the smaller id). Deterministic in seed.
TreeMap induced_map(const RealTree& tree, const ArcFamily& fam, const PlanarMap& f, std::size_t samples = 100,
                    std::uint64_t seed = 1);

// Points p of D (drawn uniformly) with h(pi(p)) != pi(f(p)); points whose
// image leaves D are skipped.
struct SemiconjugacyCheck {
    std::size_t tested = 0, skipped = 0, disagreements = 0;
};
SemiconjugacyCheck check_semiconjugacy(const RealTree& tree, const ArcFamily& fam, const TreeMap& tm,
                                       const PlanarMap& f, std::size_t n_points, std::uint64_t seed,
                                       unsigned threads = 1);

struct EntropyEstimate {
    double tree = 0.0;   // from vertex itineraries
    double plane = 0.0;  // from (n, eps)-separated subsets of the same orbits
    std::size_t n1 = 0, n2 = 0;
    std::size_t tree_count1 = 0, tree_count2 = 0;
    std::size_t plane_count1 = 0, plane_count2 = 0;
    std::size_t orbits = 0;  // samples whose first n2 iterates stay in D
};

// Growth rate (log N(n2) - log N(n1)) / (n2 - n1) of separated-set sizes. On
// the tree any eps < 1 of the edge metric separates distinct vertices, so N
// counts distinct itineraries; in the plane N is a greedy (n, eps)-separated
// subset of the same orbits.
EntropyEstimate tree_entropy(const RealTree& tree, const ArcFamily& fam, const PlanarMap& f,
                             const std::vector<Point2>& samples, std::size_t n1, std::size_t n2, double eps_plane,
                             unsigned threads = 1);

// pi(p), pi(f p), ..., n vertices per sample; samples leaving D within n
// steps get an empty itinerary.
std::vector<std::vector<std::size_t>> vertex_itineraries(const RealTree& tree, const ArcFamily& fam,
                                                         const PlanarMap& f, const std::vector<Point2>& samples,
                                                         std::size_t n, unsigned threads = 1);

// Growth rate of the number of distinct itinerary prefixes between n1 and n2.
double itinerary_entropy(const std::vector<std::vector<std::size_t>>& itineraries, std::size_t n1, std::size_t n2);

// Vertices with h^q(v) = v, q minimal and <= max_q.
std::vector<std::pair<std::size_t, std::size_t>> tree_periodic_points(const TreeMap& tm, std::size_t max_q);

// Each vertex of `fine` (built from a family extending `coarse`'s arcs) sent to
// the vertex of `coarse` containing it: old arcs to themselves, everything
// else through an interior point. nullopt when a fine component lands on an
// old arc or the map misses a coarse vertex.
std::optional<std::vector<std::size_t>> refinement_map(const RealTree& fine, const RealTree& coarse,
                                                       const ArcFamily& coarse_fam);

}  // namespace sdiss
