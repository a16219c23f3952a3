#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdiss/closing.hpp"
#include "sdiss/ergodic.hpp"
#include "sdiss/periodic.hpp"
#include "sdiss/pliss.hpp"
#include "sdiss/stable_manifold.hpp"
#include "sdiss/strong_dissipation.hpp"
#include "sdiss/tree.hpp"

namespace sdiss {

using Json = nlohmann::ordered_json;

// shortest round-trip decimal
std::string fmt_double(double v);

// i,x,y
void write_orbit_csv(std::ostream& os, const std::vector<Point2>& pts);
// s,x,y with s the arclength
void write_curve_csv(std::ostream& os, const Polyline& pl);
// period,x,y,residual,mult1_re,mult1_im,mult2_re,mult2_im
void write_periodic_csv(std::ostream& os, const std::vector<PeriodicOrbit>& orbits);
// period,n,k,x0,x1,p,residual,precision_bits,root
void write_periodic1d_csv(std::ostream& os, const std::vector<Orbit1D>& orbits);

Json to_json(const LyapunovEstimate& l);
Json to_json(const HyperbolicityCertificate& c);
Json to_json(const StableBranchPair& b);
Json to_json(const SDSample& s);
Json sd_summary_json(const SDVerdict& v);
Json to_json(const ClosingSample& s);
Json to_json(const DensityReport& r);
// {vertices:[{id,kind,polygon|arc_id}], edges:[[i,j]], map:[[i,h(i)]]}
Json tree_json(const RealTree& t, const TreeMap& tm);

// rows "i,t,vertex" of the vertex itineraries
void write_itineraries_csv(std::ostream& os, const std::vector<std::vector<std::size_t>>& it);

}  // namespace sdiss
