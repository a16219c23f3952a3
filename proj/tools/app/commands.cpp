#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "sdiss/closing.hpp"
#include "sdiss/errors.hpp"
#include "sdiss/io.hpp"
#include "sdiss/parallel.hpp"
#include "sdiss/random.hpp"
#include "sdiss/tree.hpp"

namespace sdiss::app {

namespace {

namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// One command invocation: config, output directory, declared files.
struct Run {
    std::string command;
    RunConfig cfg;
    fs::path out;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::ostream& log;
    std::vector<std::string> files;
    std::map<std::string, double> timings;

    void write(const std::string& name, const std::string& content) {
        std::ofstream os(out / name, std::ios::binary);
        if (!os) throw ConfigError("cannot write " + (out / name).string());
        os << content;
        if (!os) throw ConfigError("write failed: " + (out / name).string());
        if (std::find(files.begin(), files.end(), name) == files.end()) files.push_back(name);
    }
    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
    void write_jsonl(const std::string& name, const std::vector<Json>& rows) {
        std::string s;
        for (const auto& r : rows) s += r.dump() + "\n";
        write(name, s);
    }
    template <class Fn>
    void write_with(const std::string& name, Fn fn) {
        std::ostringstream os;
        fn(os);
        write(name, os.str());
    }

    // timings are the only non-reproducible field; payload files never carry them
    void manifest(double total) {
        Json cfgj = Json::object();
        for (const auto& [k, v] : cfg.entries())
            if (k != "out" && k != "threads") cfgj[k] = v;
        Json t = Json::object();
        for (const auto& [k, v] : timings) t[k] = v;
        t["total_s"] = total;
        Json m{{"command", command},
               {"version", version},
               {"config_hash", hex64(cfg.hash())},
               {"config", cfgj},
               {"seed", seed},
               {"threads", threads},
               {"files", files},
               {"timings", t}};
        std::ofstream os(out / ("manifest_" + command + ".json"), std::ios::binary);
        os << m.dump(2) << "\n";
    }
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

Point2 start_point(const RunConfig& cfg) { return {cfg.num("x0", 0.1), cfg.num("y0", 0.0)}; }

std::size_t count(const RunConfig& cfg, const std::string& key, std::int64_t def) {
    auto v = cfg.integer(key, def);
    if (v < 0) throw ConfigError("config: '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

double positive(const RunConfig& cfg, const std::string& key, double def) {
    double v = cfg.num(key, def);
    if (!(v > 0)) throw ConfigError("config: '" + key + "' must be positive");
    return v;
}

SDOptions sd_options(const Run& r) {
    SDOptions o;
    o.N = count(r.cfg, "N", 50);
    o.n_back = count(r.cfg, "n_back", 40);
    o.sample_k = count(r.cfg, "sample_k", 100);
    o.eps_chart = positive(r.cfg, "eps_chart", 1e-3);
    o.curve.eta = positive(r.cfg, "eta", 0.1);
    o.grow.eta = o.curve.eta;
    o.grow.max_pullbacks = count(r.cfg, "max_pullbacks", 40);
    o.grow.window = count(r.cfg, "window", 30);
    o.threads = r.threads;
    return o;
}

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

// Lyapunov-rate constants along the orbit of the start point.
std::pair<LyapunovEstimate, CertificateConstants> orbit_constants(const PlanarMap& f, const RunConfig& cfg) {
    auto ly = lyapunov(f, start_point(cfg), count(cfg, "lyap_n", 100000), count(cfg, "burn", 1000));
    auto c = lyapunov_constants(ly.lambda_minus, std::max(ly.lambda_plus, 0.0), positive(cfg, "cert_eps", 0.3));
    return {ly, c};
}

EmpiricalMeasure config_measure(const PlanarMap& f, const RunConfig& cfg) {
    return birkhoff_measure(f, start_point(cfg), count(cfg, "measure_n", 20000), count(cfg, "burn", 1000));
}

CertificateConstants cycle_constants(const PeriodicOrbit& o, double eps) {
    double l1 = std::log(std::abs(o.multipliers[0])) / static_cast<double>(o.q);
    double l2 = std::log(std::abs(o.multipliers[1])) / static_cast<double>(o.q);
    if (l1 > l2) std::swap(l1, l2);
    return lyapunov_constants(l1, std::max(l2, 0.0), eps);
}

std::vector<Point2> cycle_points(const PlanarMap& f, const PeriodicOrbit& o) {
    if (auto c = newton_cycle(f, {o.p}, o.q)) return *c;
    throw NumericalError("could not refine the cycle of period " + std::to_string(o.q));
}

Json constants_json(const CertificateConstants& c) {
    return Json{{"sigma", c.sigma}, {"sigma_tilde", c.sigma_tilde}, {"rho", c.rho}, {"rho_tilde", c.rho_tilde}};
}

Json dissipation_json(const DissipationReport& d) {
    return Json{{"sup_det", d.sup_det},   {"inf_conorm_pow", d.inf_conorm_pow}, {"inf_angles_pow", d.inf_angles_pow},
                {"margin", d.margin},     {"grid_n", d.grid_n},                 {"holds", d.holds()}};
}

// ---------------------------------------------------------------------------

void cmd_simulate(Run& r) {
    auto f = planar_map(r.cfg);
    const std::size_t n = count(r.cfg, "n", 10000), burn = count(r.cfg, "burn", 0);
    auto seg = iterate(f, start_point(r.cfg), burn + n);
    if (seg.overflow) throw NumericalError("simulate: orbit escaped after " + std::to_string(seg.length()) + " steps");
    std::vector<Point2> pts(seg.points.begin() + static_cast<std::ptrdiff_t>(burn), seg.points.end());
    r.write_with("orbit.csv", [&](std::ostream& os) { write_orbit_csv(os, pts); });
    r.log << "simulate: " << pts.size() << " points\n";
}

void cmd_lyapunov(Run& r) {
    auto f = planar_map(r.cfg);
    Point2 p = start_point(r.cfg);
    auto ly = lyapunov(f, p, count(r.cfg, "n", 100000), count(r.cfg, "burn", 1000));
    Json j = to_json(ly);
    const double logdet = std::log(std::abs(jacobian(f, p).det()));
    j["map"] = describe(f);
    j["x0"] = point_json(p);
    j["sum"] = ly.lambda_minus + ly.lambda_plus;
    j["log_abs_det"] = logdet;
    j["sum_error"] = std::abs(ly.lambda_minus + ly.lambda_plus - logdet);
    r.write_json("lyapunov.json", j);
    r.log << "lyapunov: " << fmt_double(ly.lambda_minus) << " " << fmt_double(ly.lambda_plus) << "\n";
}

void cmd_pliss(Run& r) {
    auto f = planar_map(r.cfg);
    auto S = region(r.cfg, f);
    auto sd = sd_options(r);
    const std::size_t n = count(r.cfg, "n", 20000);
    auto [ly, c] = orbit_constants(f, r.cfg);

    auto base = iterate(f, start_point(r.cfg), count(r.cfg, "burn", 1000));
    if (base.overflow) throw NumericalError("pliss: orbit escaped during burn-in");
    auto orbit = iterate(f, base.points.back(), n + sd.n_back);
    if (orbit.overflow) throw NumericalError("pliss: orbit escaped");
    auto td = tangent_data(f, orbit, n, sd.n_back);

    // hyperbolic times of the contraction rates along E
    const auto& a = td.log_stretch;
    double lo = *std::min_element(a.begin(), a.end()), mean = 0;
    for (double v : a) mean += v;
    mean /= static_cast<double>(a.size());
    PlissParams pp;
    pp.alpha1 = r.cfg.num("alpha1", lo - 1e-6 * std::max(1.0, std::abs(lo)));
    pp.alpha2 = r.cfg.num("alpha2", mean + 1e-9 * std::max(1.0, std::abs(mean)));
    pp.alpha3 = r.cfg.num("alpha3", pp.alpha2 + positive(r.cfg, "cert_eps", 0.3));
    auto pr = pliss_times(a, pp);

    Json j{{"map", describe(f)},
           {"n", n},
           {"lambda_minus", ly.lambda_minus},
           {"lambda_plus", ly.lambda_plus},
           {"mean", mean},
           {"alpha1", pp.alpha1},
           {"alpha2", pp.alpha2},
           {"alpha3", pp.alpha3},
           {"count", pr.indices.size()},
           {"density", pr.density},
           {"density_bound", (pp.alpha3 - pp.alpha2) / (pp.alpha3 - pp.alpha1)}};
    Json head = Json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(20, pr.indices.size()); ++i) head.push_back(pr.indices[i]);
    j["first_indices"] = head;

    // certificates at evenly spread Pliss times
    auto pick = sample_indices(pr.indices.size(), sd.sample_k);
    std::vector<HyperbolicityCertificate> certs(pick.size());
    parallel_for(pick.size(), r.threads, [&](std::size_t i) {
        certs[i] = certify_point(f, orbit.points[pr.indices[pick[i]]], c, sd.N, sd.n_back);
    });
    std::vector<Json> rows;
    std::size_t passed = 0;
    for (std::size_t i = 0; i < certs.size(); ++i) {
        Json row = to_json(certs[i]);
        row["index"] = pr.indices[pick[i]];
        rows.push_back(row);
        passed += certs[i].pass;
    }
    j["constants"] = constants_json(c);
    j["certificates"] = certs.size();
    j["certified"] = passed;

    // constants from grid extrema of the Jacobian
    auto je = jacobian_extrema(f, S, static_cast<int>(count(r.cfg, "p1_grid", 1000)));
    Json p1{{"D", je.D}, {"m", je.m}, {"norm", je.norm}};
    try {
        auto pc = p1_constants(je.D, je.m);
        p1["valid"] = pc.valid;
        p1["constants"] = constants_json(pc.constants());
        if (pc.valid) {
            p1["chain_holds"] = p1_chain_holds(pc);
            auto mu = birkhoff_measure(f, start_point(r.cfg), count(r.cfg, "block_n", 2000), count(r.cfg, "burn", 1000));
            p1["block_fraction"] = block_fraction(mu, f, pc.constants(), sd.N, sd.n_back, r.threads);
        }
    } catch (const ParameterError& e) {
        p1["valid"] = false;
        p1["error"] = e.what();
    }
    auto bound = p1_density_bound();
    p1["density_bound"] = Json::array({bound.num, bound.den});
    p1["density_bound_exceeds_one_sixth"] = Rational(1, 6) < bound;
    j["p1"] = p1;

    r.write_json("pliss.json", j);
    r.write_jsonl("certificates.jsonl", rows);
    r.log << "pliss: " << pr.indices.size() << " times, density " << fmt_double(pr.density) << "\n";
}

void cmd_stable(Run& r) {
    auto f = planar_map(r.cfg);
    auto S = region(r.cfg, f);
    auto sd = sd_options(r);
    const std::size_t len = orbit_need(sd);
    const std::string where = r.cfg.str("point", "fixed");

    OrbitSegment orbit;
    CertificateConstants c;
    Json origin;
    if (where == "fixed") {
        auto orbits = find_periodic_orbits(f, S, 1, static_cast<int>(count(r.cfg, "grid_n", 20)));
        auto it = std::find_if(orbits.begin(), orbits.end(), [](const PeriodicOrbit& o) { return o.saddle(); });
        if (it == orbits.end()) throw NumericalError("stable: no saddle fixed point in the region");
        Point2 p = cycle_points(f, *it)[0];
        orbit.points.assign(len + 1, p);
        c = cycle_constants(*it, positive(r.cfg, "cert_eps", 0.2));
        Mat2 J = jacobian(f, p);
        auto ev = J.eigenvalues();
        double ls = std::abs(ev[0]) < std::abs(ev[1]) ? ev[0].real() : ev[1].real();
        origin = Json{{"kind", "fixed"}, {"point", point_json(p)}, {"stable_eigenvector", Json(nullptr)}};
        Point2 v = eigenvector(J, ls);
        origin["stable_eigenvector"] = point_json(v);
    } else {
        auto w = r.cfg.list("point", {});
        if (w.size() != 2) throw ConfigError("config: 'point' must be 'fixed' or 'x y'");
        orbit = iterate(f, {w[0], w[1]}, len);
        if (orbit.overflow) throw NumericalError("stable: orbit escaped");
        c = orbit_constants(f, r.cfg).second;
        origin = Json{{"kind", "point"}, {"point", point_json({w[0], w[1]})}};
    }

    const std::size_t tcount = len - sd.n_back;
    auto td = tangent_data(f, orbit, tcount, sd.n_back);
    auto cert = certify(td, c, sd.N);
    Json j{{"map", describe(f)}, {"origin", origin}, {"constants", constants_json(c)}, {"certificate", to_json(cert)}};
    if (!cert.pass) {
        r.write_json("branch.json", j);
        throw NumericalError("stable: base point not certified (first failure at n = " +
                             std::to_string(cert.first_fail_n.value_or(0)) + ")");
    }
    auto cs = chart_sequence(f, td, c, choose_rates(c), sd.N, sd.eps_chart);
    auto curve = local_stable_curve(f, cs, sd.curve);
    GrowOptions g = sd.grow;
    g.r0 = curve.r0;
    auto br = grow_branches(f, td, S, g);

    Json lc{{"r0", curve.r0},
            {"C", curve.C},
            {"lambda", curve.lambda},
            {"tangent", point_json(curve.E)},
            {"halvings", curve.halvings},
            {"forward_lengths", curve.forward_lengths}};
    if (origin.contains("stable_eigenvector") && !origin["stable_eigenvector"].is_null())
        lc["tangent_error"] = line_angle(curve.E, {origin["stable_eigenvector"][0], origin["stable_eigenvector"][1]});
    j["local_curve"] = lc;
    j["branches"] = to_json(br);

    r.write_with("curve.csv", [&](std::ostream& os) { write_curve_csv(os, curve.points); });
    r.write_with("branch_plus.csv", [&](std::ostream& os) { write_curve_csv(os, br.plus); });
    r.write_with("branch_minus.csv", [&](std::ostream& os) { write_curve_csv(os, br.minus); });
    r.write_json("branch.json", j);
    r.log << "stable: r0 " << fmt_double(curve.r0) << ", exits " << br.exit_plus << br.exit_minus << "\n";
}

void cmd_verify_sd(Run& r) {
    auto f = planar_map(r.cfg);
    auto S = region(r.cfg, f);
    auto sd = sd_options(r);
    std::string measure = r.cfg.str("measure", "auto");
    if (measure != "auto" && measure != "birkhoff" && measure != "saddles")
        throw ConfigError("config: 'measure' must be auto, birkhoff or saddles");

    Json summary{{"map", describe(f)}};
    summary["dissipation2"] = dissipation_json(check_dissipation2(f, S, static_cast<int>(count(r.cfg, "dissipation_grid", 200))));
    std::vector<Json> rows;

    if (measure != "saddles") {
        auto mu = config_measure(f, r.cfg);
        auto [ly, c] = orbit_constants(f, r.cfg);
        auto v = verify_strong_dissipation(f, S, mu, c, sd);
        if (measure == "birkhoff" || !v.sink_supported) {
            measure = "birkhoff";
            summary["measure"] = measure;
            summary["lyapunov"] = to_json(ly);
            summary["constants"] = constants_json(c);
            summary["verdict"] = sd_summary_json(v);
            summary["fraction"] = v.fraction;
            for (const auto& s : v.samples) rows.push_back(to_json(s));
        } else {
            summary["birkhoff_sink_supported"] = true;
            measure = "saddles";
        }
    }
    if (measure == "saddles") {
        const double eps = positive(r.cfg, "saddle_eps", 0.2);
        auto pv = verify_on_periodic_orbits(f, S, count(r.cfg, "max_q", 12), static_cast<int>(count(r.cfg, "grid_n", 40)),
                                            eps, sd);
        summary["measure"] = "saddles";
        summary["saddle_eps"] = eps;
        Json orbits = Json::array();
        for (std::size_t i = 0; i < pv.orbits.size(); ++i) {
            const auto& ov = pv.orbits[i];
            Json o{{"period", ov.orbit.q},
                   {"x", ov.orbit.p.x},
                   {"y", ov.orbit.p.y},
                   {"saddle", ov.orbit.saddle()},
                   {"lambda_minus", ov.lambda_minus},
                   {"lambda_plus", ov.lambda_plus}};
            o["verdict"] = sd_summary_json(ov.verdict);
            orbits.push_back(o);
            for (const auto& s : ov.verdict.samples) {
                Json row = to_json(s);
                row["orbit"] = i;
                row["period"] = ov.orbit.q;
                rows.push_back(row);
            }
        }
        summary["orbits"] = orbits;
        summary["verdict"] = Json{{"certified", pv.certified},
                                  {"decided", pv.decided},
                                  {"undecided", pv.undecided},
                                  {"both_exit", pv.both_exit},
                                  {"fraction", pv.decided ? Json(pv.fraction) : Json(nullptr)}};
        summary["fraction"] = pv.decided ? Json(pv.fraction) : Json(nullptr);
    }
    r.write_jsonl("sd_samples.jsonl", rows);
    r.write_json("sd_summary.json", summary);
    r.log << "verify-sd (" << measure << "): fraction " << summary["fraction"].dump() << "\n";
}

void cmd_close_1d(Run& r) {
    auto g = interval_map(r.cfg);
    const double delta = positive(r.cfg, "delta", 1e-2);
    const std::size_t seeds = count(r.cfg, "seeds", 20), burn = count(r.cfg, "burn", 100);
    const std::size_t max_n = count(r.cfg, "max_n", 20000);
    const Interval I = domain(g);
    CounterRng rng(r.seed);

    std::vector<double> xs(seeds);
    for (std::size_t i = 0; i < seeds; ++i) {
        double x = rng.uniform(i, I.lo, I.hi);
        for (std::size_t k = 0; k < burn; ++k) x = eval(g, x);
        xs[i] = x;
    }
    std::vector<std::optional<Orbit1D>> found(seeds);
    parallel_for(seeds, r.threads, [&](std::size_t i) { found[i] = interval_periodic_near(g, xs[i], delta, max_n); });

    std::vector<Orbit1D> orbits;
    Json samples = Json::array();
    std::size_t ok = 0;
    double worst = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
        Json s{{"index", i}, {"x", xs[i]}, {"found", found[i].has_value()}};
        if (found[i]) {
            const auto& o = *found[i];
            s["period"] = o.period;
            s["p"] = o.p;
            s["distance"] = std::abs(o.p - xs[i]);
            s["residual"] = o.residual;
            worst = std::max(worst, std::abs(o.p - xs[i]));
            orbits.push_back(o);
            ++ok;
        }
        samples.push_back(s);
    }
    Json j{{"map", "quadratic"},
           {"c", r.cfg.num("c")},
           {"delta", delta},
           {"seeds", seeds},
           {"found", ok},
           {"max_distance", worst},
           {"samples", samples}};
    r.write_with("periodic1d.csv", [&](std::ostream& os) { write_periodic1d_csv(os, orbits); });
    r.write_json("close1d.json", j);
    r.log << "close (1D): " << ok << "/" << seeds << " closed\n";
}

void cmd_close(Run& r) {
    if (is_interval_family(r.cfg)) return cmd_close_1d(r);
    auto f = planar_map(r.cfg);
    auto S = region(r.cfg, f);
    auto deltas = r.cfg.list("deltas", {r.cfg.num("delta", 0.05)});
    const std::size_t budget = count(r.cfg, "budget", 100);

    ClosingOptions base;
    base.sd = sd_options(r);
    base.threads = r.threads;
    base.max_return = count(r.cfg, "max_return", 2000);
    base.max_k = count(r.cfg, "max_k", 200);
    base.max_candidates = count(r.cfg, "max_candidates", 40);
    base.max_pairs = count(r.cfg, "max_pairs", 8);
    base.max_m = count(r.cfg, "max_m", 3);
    base.max_period = count(r.cfg, "max_period", 400);
    base.constants = orbit_constants(f, r.cfg).second;
    auto mu = config_measure(f, r.cfg);

    PeriodicRegistry registry;
    Json summary = Json::array();
    for (double d : deltas) {
        if (!(d > 0)) throw ConfigError("config: every delta must be positive");
        ClosingOptions opt = base;
        opt.delta = d;
        Stopwatch sw;
        auto rep = periodic_density_report(f, S, mu, budget, opt, &registry);
        r.timings["delta_" + fmt_double(d)] = sw.seconds();
        r.write_json("density_" + fmt_double(d) + ".json", to_json(rep));
        summary.push_back(Json{{"delta", d},
                               {"success_fraction", rep.success_fraction},
                               {"coverage_fraction", rep.coverage_fraction},
                               {"max_period", rep.max_period}});
        r.log << "close: delta " << fmt_double(d) << " success " << fmt_double(rep.success_fraction) << " max period "
              << rep.max_period << "\n";
    }
    r.write_with("periodic.csv", [&](std::ostream& os) { write_periodic_csv(os, registry.orbits()); });
    r.write_json("close.json", Json{{"map", describe(f)}, {"budget", budget}, {"runs", summary}});
}

Disc config_disc(const RunConfig& cfg, const PlanarMap& f, const TrappingRegion& S) {
    const std::string desc = cfg.str("disc", "image 1");
    std::istringstream is(desc);
    std::string kind;
    is >> kind;
    if (kind == "image") {
        std::size_t m = 1;
        if (!(is >> m) || m == 0) throw ConfigError("config: disc 'image' needs m >= 1");
        return image_disc(f, S, m);
    }
    if (kind == "rect") {
        double x0, x1, y0, y1;
        if (!(is >> x0 >> x1 >> y0 >> y1) || !(x0 < x1 && y0 < y1))
            throw ConfigError("config: disc 'rect' needs xmin xmax ymin ymax");
        return Disc({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    }
    throw ConfigError("config: unknown disc kind '" + kind + "'");
}

void cmd_reduce(Run& r) {
    auto f = planar_map(r.cfg);
    auto S = region(r.cfg, f);
    Disc D = config_disc(r.cfg, f, S);
    ArcOptions opt;
    opt.sd = sd_options(r);
    opt.preimage_rounds = count(r.cfg, "preimage_rounds", 1);
    opt.h_max = positive(r.cfg, "h_max", 2e-3);
    opt.meet_image = r.cfg.flag("meet_image", true);

    std::vector<ArcSeed> seeds;
    const std::string kind = r.cfg.str("seeds", "birkhoff");
    if (kind == "birkhoff") {
        auto mu = config_measure(f, r.cfg);
        auto c = orbit_constants(f, r.cfg).second;
        const std::size_t stride = std::max<std::size_t>(1, count(r.cfg, "seed_stride", 97));
        std::vector<Point2> pts;
        for (std::size_t i = 0; i < mu.size(); i += stride) pts.push_back(mu.samples[i]);
        seeds = seeds_from_points(f, pts, c, opt.sd);
    } else if (kind == "cycles") {
        const double eps = positive(r.cfg, "saddle_eps", 0.2);
        for (const auto& o : find_periodic_orbits(f, S, count(r.cfg, "max_q", 1), static_cast<int>(count(r.cfg, "grid_n", 20)))) {
            if (!o.saddle()) continue;
            auto more = seeds_from_cycle(cycle_points(f, o), cycle_constants(o, eps), opt.sd);
            seeds.insert(seeds.end(), more.begin(), more.end());
        }
    } else {
        throw ConfigError("config: 'seeds' must be birkhoff or cycles");
    }

    Stopwatch sw;
    auto fam = collect_arcs(f, S, D, count(r.cfg, "arcs", 20), seeds, opt);
    r.timings["arcs_s"] = sw.seconds();
    auto tree = build_tree(fam);
    auto tm = induced_map(tree, fam, f, count(r.cfg, "map_samples", 100), r.seed);
    auto sc = check_semiconjugacy(tree, fam, tm, f, count(r.cfg, "semiconjugacy_points", 10000), r.seed, r.threads);

    // entropy samples: uniform in D
    const std::size_t ns = count(r.cfg, "entropy_samples", 20000);
    const std::size_t n1 = count(r.cfg, "n1", 3), n2 = count(r.cfg, "n2", 7);
    if (!(n1 >= 1 && n1 < n2)) throw ConfigError("config: need 1 <= n1 < n2");
    CounterRng rng = CounterRng(r.seed).substream(7);
    std::vector<Point2> samples;
    for (std::uint64_t i = 0; samples.size() < ns && i < 1000 * (ns + 1); ++i) {
        Point2 p = rng.point_in_box(i, D.box());
        if (D.contains(p)) samples.push_back(p);
    }
    auto ent = tree_entropy(tree, fam, f, samples, n1, n2, positive(r.cfg, "eps_plane", 0.05), r.threads);
    std::vector<Point2> head(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(
                                                                    count(r.cfg, "itinerary_rows", 200), samples.size())));
    auto itins = vertex_itineraries(tree, fam, f, head, n2, r.threads);
    auto per = tree_periodic_points(tm, count(r.cfg, "tree_max_q", 8));

    Json j{{"map", describe(f)},
           {"arcs", fam.size()},
           {"seed_arcs", fam.seeds},
           {"discarded", fam.discarded},
           {"preimage_rounds", fam.rounds},
           {"vertices", tree.vertices.size()},
           {"edges", tree.edges.size()},
           {"components", tree.components},
           {"euler", static_cast<long long>(tree.vertices.size()) - static_cast<long long>(tree.edges.size())},
           {"flags", tm.flags()},
           {"semiconjugacy", Json{{"tested", sc.tested}, {"skipped", sc.skipped}, {"disagreements", sc.disagreements}}},
           {"entropy", Json{{"tree", ent.tree},
                            {"plane", ent.plane},
                            {"n1", ent.n1},
                            {"n2", ent.n2},
                            {"tree_counts", Json::array({ent.tree_count1, ent.tree_count2})},
                            {"plane_counts", Json::array({ent.plane_count1, ent.plane_count2})},
                            {"orbits", ent.orbits}}},
           {"periodic_vertices", per.size()}};
    r.write_json("tree.json", tree_json(tree, tm));
    r.write_with("itineraries.csv", [&](std::ostream& os) { write_itineraries_csv(os, itins); });
    r.write_json("reduce.json", j);
    r.log << "reduce: " << fam.size() << " arcs, V-E = " << j["euler"].dump() << ", flags " << tm.flags()
          << ", entropy " << fmt_double(ent.tree) << "\n";
}

// Scalar fields of every JSON output declared by the manifests in the directory.
void cmd_report(Run& r) {
    std::vector<fs::path> manifests;
    for (const auto& e : fs::directory_iterator(r.out)) {
        auto name = e.path().filename().string();
        if (name.rfind("manifest_", 0) == 0 && e.path().extension() == ".json" && name != "manifest_report.json")
            manifests.push_back(e.path());
    }
    std::sort(manifests.begin(), manifests.end());
    Json runs = Json::array();
    for (const auto& mp : manifests) {
        std::ifstream is(mp);
        Json m;
        try {
            m = Json::parse(is);
        } catch (const Json::parse_error& e) {
            throw ConfigError("report: cannot parse " + mp.string() + ": " + e.what());
        }
        Json entry{{"command", m.value("command", "")}, {"config_hash", m.value("config_hash", "")}};
        Json outputs = Json::object();
        for (const auto& fj : m["files"]) {
            const std::string name = fj.get<std::string>();
            if (fs::path(name).extension() != ".json") continue;
            std::ifstream fi(r.out / name);
            if (!fi) throw ConfigError("report: declared file missing: " + name);
            Json d = Json::parse(fi);
            Json flat = Json::object();
            for (auto it = d.begin(); it != d.end(); ++it)
                if (!it.value().is_structured()) flat[it.key()] = it.value();
            outputs[name] = flat;
        }
        entry["outputs"] = outputs;
        runs.push_back(entry);
    }
    r.write_json("report.json", Json{{"runs", runs}});
    r.log << "report: " << runs.size() << " runs\n";
}

// options shared by every subcommand
struct Common {
    std::string config, out = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::vector<std::string> sets;
    std::map<std::string, std::string> overrides;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"strong-dissipation laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version);

    struct Command {
        const char* name;
        const char* help;
        void (*fn)(Run&);
        std::vector<std::pair<const char*, const char*>> overrides;  // option, config key
        bool needs_config = true;
    };
    const std::vector<Command> commands = {
        {"simulate", "orbit of the start point", cmd_simulate, {{"--n", "n"}, {"--burn", "burn"}, {"--x0", "x0"}, {"--y0", "y0"}}},
        {"lyapunov", "Lyapunov exponents", cmd_lyapunov, {{"--n", "n"}, {"--burn", "burn"}, {"--x0", "x0"}, {"--y0", "y0"}}},
        {"pliss", "Pliss times, certificates and p1 constants", cmd_pliss,
         {{"--n", "n"}, {"--N", "N"}, {"--cert-eps", "cert_eps"}, {"--p1-grid", "p1_grid"}}},
        {"stable", "local stable curve and grown branches", cmd_stable, {{"--N", "N"}, {"--cert-eps", "cert_eps"}}},
        {"verify-sd", "strong-dissipation verifier", cmd_verify_sd,
         {{"--N", "N"}, {"--sample-k", "sample_k"}, {"--cert-eps", "cert_eps"}, {"--saddle-eps", "saddle_eps"}}},
        {"close", "periodic points near recurrent samples", cmd_close,
         {{"--delta", "delta"}, {"--budget", "budget"}, {"--max-m", "max_m"}, {"--seeds", "seeds"}}},
        {"reduce", "arc family, quotient tree and entropy", cmd_reduce,
         {{"--arcs", "arcs"}, {"--rounds", "preimage_rounds"}, {"--n1", "n1"}, {"--n2", "n2"}}},
        {"report", "summary of the runs in the output directory", cmd_report, {}, false},
    };

    Common common;
    std::map<std::string, std::string> raw;
    for (const auto& s : commands) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", common.config, "key = value config file");
        sub->add_option("--seed", common.seed, "64-bit seed");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_option("--set", common.sets, "config override key=value")->take_all();
        for (const auto& [opt, key] : s.overrides)
            sub->add_option(opt, raw[std::string(s.name) + "/" + key], std::string("override '") + key + "'")
                ->check(CLI::Number);
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return exit_ok;
        }
        app.exit(e, out, err);
        return exit_config;
    }

    const Command* cmd = nullptr;
    CLI::App* sub = nullptr;
    for (const auto& s : commands)
        if (app.got_subcommand(s.name)) cmd = &s, sub = app.get_subcommand(s.name);

    try {
        Stopwatch sw;
        RunConfig cfg;
        if (!common.config.empty()) cfg = RunConfig::load(common.config);
        for (const auto& kv : common.sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto& [opt, key] : cmd->overrides)
            if (sub->count(opt)) cfg.set(key, raw[std::string(cmd->name) + "/" + key]);
        if (common.seed) cfg.set("seed", std::to_string(*common.seed));
        if (cmd->needs_config) cfg.require("family");

        Run r{cmd->name, cfg, fs::path(common.out), cfg.u64("seed", 1), common.threads, out, {}, {}};
        std::error_code ec;
        fs::create_directories(r.out, ec);
        if (ec) throw ConfigError("cannot create output directory " + common.out + ": " + ec.message());
        cmd->fn(r);
        r.manifest(sw.seconds());
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "sdiss " << cmd->name << ": " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalError& e) {
        err << "sdiss " << cmd->name << ": numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const DomainError& e) {
        err << "sdiss " << cmd->name << ": numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const ParameterError& e) {
        err << "sdiss " << cmd->name << ": invalid parameters: " << e.what() << "\n";
        return exit_config;
    } catch (const Json::exception& e) {
        err << "sdiss " << cmd->name << ": " << e.what() << "\n";
        return exit_config;
    }
}

}  // namespace sdiss::app
