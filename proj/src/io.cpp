#include "sdiss/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace sdiss {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_orbit_csv(std::ostream& os, const std::vector<Point2>& pts) {
    os << "i,x,y\n";
    for (std::size_t i = 0; i < pts.size(); ++i) os << i << ',' << fmt_double(pts[i].x) << ',' << fmt_double(pts[i].y) << '\n';
}

void write_curve_csv(std::ostream& os, const Polyline& pl) {
    os << "s,x,y\n";
    auto s = arclength(pl);
    for (std::size_t i = 0; i < pl.size(); ++i)
        os << fmt_double(s[i]) << ',' << fmt_double(pl[i].x) << ',' << fmt_double(pl[i].y) << '\n';
}

void write_periodic_csv(std::ostream& os, const std::vector<PeriodicOrbit>& orbits) {
    os << "period,x,y,residual,mult1_re,mult1_im,mult2_re,mult2_im\n";
    for (const auto& o : orbits)
        os << o.q << ',' << fmt_double(o.p.x) << ',' << fmt_double(o.p.y) << ',' << fmt_double(o.residual) << ','
           << fmt_double(o.multipliers[0].real()) << ',' << fmt_double(o.multipliers[0].imag()) << ','
           << fmt_double(o.multipliers[1].real()) << ',' << fmt_double(o.multipliers[1].imag()) << '\n';
}

void write_periodic1d_csv(std::ostream& os, const std::vector<Orbit1D>& orbits) {
    os << "period,n,k,x0,x1,p,residual,precision_bits,root\n";
    for (const auto& o : orbits)
        os << o.period << ',' << o.n << ',' << o.k << ',' << fmt_double(o.x0) << ',' << fmt_double(o.x1) << ','
           << fmt_double(o.p) << ',' << fmt_double(o.residual) << ',' << o.precision_bits << ',' << o.root << '\n';
}

namespace {

// json has no inf/nan
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const LyapunovEstimate& l) {
    return Json{{"lambda_minus", num(l.lambda_minus)}, {"lambda_plus", num(l.lambda_plus)}, {"n", l.n}, {"burn", l.burn}};
}

Json to_json(const HyperbolicityCertificate& c) {
    Json j{{"x", num(c.x.x)},
           {"y", num(c.x.y)},
           {"E_angle", num(std::atan2(c.E.y, c.E.x))},
           {"sigma", num(c.c.sigma)},
           {"sigma_tilde", num(c.c.sigma_tilde)},
           {"rho", num(c.c.rho)},
           {"rho_tilde", num(c.c.rho_tilde)},
           {"N", c.N},
           {"pass", c.pass}};
    j["first_fail_n"] = c.first_fail_n ? Json(*c.first_fail_n) : Json(nullptr);
    return j;
}

Json to_json(const StableBranchPair& b) {
    return Json{{"x", num(b.x.x)},
                {"y", num(b.x.y)},
                {"exit_plus", b.exit_plus},
                {"exit_minus", b.exit_minus},
                {"length_plus", num(b.length_plus())},
                {"length_minus", num(b.length_minus())},
                {"pullbacks", b.pullbacks}};
}

Json to_json(const SDSample& s) {
    return Json{{"index", s.index},
                {"x", num(s.p.x)},
                {"y", num(s.p.y)},
                {"certified", s.certified},
                {"decided", s.decided},
                {"exit_plus", s.exit_plus},
                {"exit_minus", s.exit_minus},
                {"length_plus", num(s.length_plus)},
                {"length_minus", num(s.length_minus)},
                {"pullbacks", s.pullbacks},
                {"r0", num(s.r0)},
                {"note", s.note}};
}

Json sd_summary_json(const SDVerdict& v) {
    return Json{{"samples", v.samples.size()},   {"certified", v.certified},
                {"decided", v.decided},          {"undecided", v.undecided},
                {"both_exit", v.both_exit},      {"fraction", num(v.fraction)},
                {"sink_supported", v.sink_supported}, {"vacuous", v.vacuous}};
}

Json to_json(const ClosingSample& s) {
    Json j{{"index", s.index},  {"x", num(s.x.x)},  {"y", num(s.x.y)}, {"closed", s.closed},
           {"degenerate", s.degenerate}};
    if (s.closed) {
        j["period"] = s.orbit.q;
        j["px"] = num(s.orbit.p.x);
        j["py"] = num(s.orbit.p.y);
        j["residual"] = num(s.orbit.residual);
        j["distance"] = num(s.distance);
        j["n"] = s.n;
        j["k"] = s.k;
        j["m"] = s.m;
        j["region_diameter"] = num(s.region_diameter);
        j["degree"] = s.degree ? Json(*s.degree) : Json(nullptr);
    }
    j["note"] = s.note;
    return j;
}

Json to_json(const DensityReport& r) {
    Json samples = Json::array();
    for (const auto& s : r.samples) samples.push_back(to_json(s));
    return Json{{"delta", num(r.delta)},
                {"budget", r.samples.size()},
                {"closed", r.closed},
                {"success_fraction", num(r.success_fraction)},
                {"coverage_fraction", num(r.coverage_fraction)},
                {"max_period", r.max_period},
                {"orbits", r.orbits.size()},
                {"samples", samples}};
}

Json tree_json(const RealTree& t, const TreeMap& tm) {
    Json verts = Json::array();
    for (std::size_t i = 0; i < t.vertices.size(); ++i) {
        const auto& v = t.vertices[i];
        Json j{{"id", i}};
        if (v.kind == VertexKind::Component) {
            j["kind"] = "component";
            Json poly = Json::array();
            for (Point2 p : v.polygon) poly.push_back(Json::array({num(p.x), num(p.y)}));
            j["polygon"] = poly;
        } else {
            j["kind"] = "arc";
            j["arc_id"] = v.arc;
        }
        verts.push_back(j);
    }
    Json edges = Json::array();
    for (auto [a, b] : t.edges) edges.push_back(Json::array({a, b}));
    Json map = Json::array();
    for (std::size_t i = 0; i < tm.h.size(); ++i) map.push_back(Json::array({i, tm.h[i]}));
    return Json{{"vertices", verts}, {"edges", edges}, {"map", map}};
}

void write_itineraries_csv(std::ostream& os, const std::vector<std::vector<std::size_t>>& it) {
    os << "i,t,vertex\n";
    for (std::size_t i = 0; i < it.size(); ++i)
        for (std::size_t t = 0; t < it[i].size(); ++t) os << i << ',' << t << ',' << it[i][t] << '\n';
}

}  // namespace sdiss
