#include "sdiss/closing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdiss/errors.hpp"
#include "sdiss/parallel.hpp"

namespace sdiss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_closed(const Polyline& poly, Point2 p, double tol) {
    return point_in_polygon(poly, p) || distance_to_polygon_boundary(poly, p) <= tol;
}

Polyline subsample(const Polyline& v, std::size_t cap) {
    if (v.size() <= cap) return v;
    Polyline out;
    for (std::size_t i = 0; i < cap; ++i) out.push_back(v[i * v.size() / cap]);
    return out;
}

double directed_hausdorff(const Polyline& a, const Polyline& b) {
    double worst = 0.0;
    for (Point2 p : a) {
        double best = kInf;
        for (Point2 q : b) {
            best = std::min(best, (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
            if (best <= worst) break;  // cannot raise the max
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

Point2 iterate_n(const PlanarMap& f, Point2 p, std::size_t n) { return iterate_point(f, p, n); }

}  // namespace

// ---------------------------------------------------------------------------
// region

bool ClosingRegion::in_R(Point2 p, double tol) const { return in_closed(R, p, tol); }
bool ClosingRegion::in_Dplus(Point2 p, double tol) const { return in_closed(Dplus, p, tol); }
bool ClosingRegion::in_Dminus(Point2 p, double tol) const { return in_closed(Dminus, p, tol); }

double ClosingRegion::level(Point2 p) const {
    const double d0 = distance_to_polyline(p, arc0.pts), d1 = distance_to_polyline(p, arc1.pts);
    if (point_in_polygon(Dplus, p)) return 1.0 + d1;
    if (point_in_polygon(Dminus, p)) return -d0;
    if (point_in_polygon(R, p)) return d0 / (d0 + d1);
    // outside D: continue from the nearest face
    const double eR = distance_to_polygon_boundary(R, p), eP = distance_to_polygon_boundary(Dplus, p),
                 eM = distance_to_polygon_boundary(Dminus, p);
    if (eP <= eR && eP <= eM) return 1.0 + d1;
    if (eM <= eR) return -d0;
    return d0 / (d0 + d1);
}

ClosingRegion build_region(const Disc& D, std::size_t m, Point2 x0, std::size_t n, const StableBranchPair& b0,
                           const StableBranchPair& b1, double delta) {
    ClosingRegion r;
    r.D = D;
    r.m = m;
    r.x0 = x0;
    r.x1 = b1.x;
    r.n = n;
    auto c0 = clip_chord(D, x0, b0.plus, b0.minus);
    auto c1 = clip_chord(D, b1.x, b1.plus, b1.minus);
    if (!c0 || !c1) throw GeometryError("build_region: a stable arc does not cross the disc");
    for (const Chord* c : {&*c0, &*c1})
        if (std::min(c->angle_a, c->angle_b) < min_crossing_angle)
            throw GeometryError("build_region: stable arc meets the disc boundary within " +
                                std::to_string(min_crossing_angle) + " rad of tangency");
    r.arc0 = *c0;
    r.arc1 = *c1;
    auto faces = subdivide(D, {r.arc0, r.arc1});
    for (auto& fc : faces) {
        if (fc.chords.size() == 2)
            r.R = std::move(fc.polygon);
        else if (fc.chords.size() == 1 && fc.chords[0] == 0)
            r.Dminus = std::move(fc.polygon);
        else if (fc.chords.size() == 1 && fc.chords[0] == 1)
            r.Dplus = std::move(fc.polygon);
    }
    if (r.R.empty() || r.Dminus.empty() || r.Dplus.empty()) throw GeometryError("build_region: unexpected face structure");
    r.diameter = diameter(r.R);
    if (!(r.diameter < delta))
        throw GeometryError("build_region: region diameter " + std::to_string(r.diameter) + " is not below delta");
    return r;
}

std::size_t first_exit_k(const PlanarMap& f, const ClosingRegion& region, std::size_t max_k) {
    Point2 z = iterate_n(f, region.x0, region.n);  // g(x0)
    bool in = region.in_Dplus(z);
    for (std::size_t k = 1; k <= max_k; ++k) {
        Point2 z1 = iterate_n(f, z, region.n);
        bool in1 = region.in_Dplus(z1);
        if (!is_finite(z1)) break;
        if (in && !in1) return k;
        z = z1;
        in = in1;
    }
    throw NumericalError("first_exit_k: the orbit did not leave D+ within " + std::to_string(max_k) + " returns");
}

// ---------------------------------------------------------------------------
// degree

std::optional<int> fixed_point_degree(const PlanarMap& f, std::size_t q, const Polyline& polygon) {
    if (polygon.size() < 3) throw ParameterError("fixed_point_degree: polygon needs 3 vertices");
    Polyline closed = polygon;
    closed.push_back(polygon.front());
    const auto s = arclength(closed);
    const double L = s.back();
    auto field = [&](double t) {
        Point2 z = point_at_arclength(closed, s, t);
        return iterate_point(f, z, q) - z;
    };
    auto ang = [](Point2 v) { return std::atan2(v.y, v.x); };
    auto wrap = [](double a) {
        while (a > std::numbers::pi) a -= 2 * std::numbers::pi;
        while (a <= -std::numbers::pi) a += 2 * std::numbers::pi;
        return a;
    };
    const int base = 512;
    const std::size_t cap = 200000;
    std::size_t evals = 0;
    double total = 0.0;
    struct Item {
        double t0, t1;
        Point2 v0, v1;
        int depth;
    };
    Point2 first = field(0.0);
    ++evals;
    Point2 prev = first;
    for (int i = 0; i < base; ++i) {
        double t0 = L * i / base, t1 = L * (i + 1) / base;
        Point2 v1 = (i + 1 == base) ? first : field(t1);
        ++evals;
        std::vector<Item> stack{{t0, t1, prev, v1, 0}};
        while (!stack.empty()) {
            Item it = stack.back();
            stack.pop_back();
            if (norm(it.v0) == 0.0 || norm(it.v1) == 0.0 || !is_finite(it.v0) || !is_finite(it.v1)) return std::nullopt;
            double d = wrap(ang(it.v1) - ang(it.v0));
            if (std::abs(d) <= std::numbers::pi / 4) {
                total += d;
                continue;
            }
            if (it.depth > 40 || ++evals > cap) return std::nullopt;
            double tm = 0.5 * (it.t0 + it.t1);
            Point2 vm = field(tm);
            // right half pushed first so the left half is summed first
            stack.push_back({tm, it.t1, vm, it.v1, it.depth + 1});
            stack.push_back({it.t0, tm, it.v0, vm, it.depth + 1});
        }
        prev = v1;
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

// ---------------------------------------------------------------------------
// retraction

namespace {

std::optional<PeriodicOrbit> refine_in_region(const PlanarMap& f, const ClosingRegion& region, Point2 seed,
                                              std::size_t q, std::string& why) {
    std::vector<Point2> guess{seed};
    while (guess.size() < q) guess.push_back(apply(f, guess.back()));
    NewtonOptions no;
    auto cyc = newton_cycle(f, guess, q, no);
    if (!cyc) {
        why = "Newton did not converge";
        return std::nullopt;
    }
    // the cycle point inside R (strictly, off the arcs) nearest the seed
    std::optional<Point2> best;
    for (Point2 z : *cyc) {
        if (!point_in_polygon(region.R, z)) continue;
        if (distance_to_polyline(z, region.arc0.pts) <= 1e-12 || distance_to_polyline(z, region.arc1.pts) <= 1e-12)
            continue;
        if (!best || dist(z, seed) < dist(*best, seed)) best = z;
    }
    if (!best) {
        why = "refined cycle has no point in R off the arcs";
        return std::nullopt;
    }
    auto o = describe_orbit(f, *best, q);
    if (!(o.residual < 1e-8)) {
        why = "plain-iteration residual " + std::to_string(o.residual) + " of the refined point exceeds 1e-8";
        return std::nullopt;
    }
    return o;
}

}  // namespace

RetractionResult retract_fixed_point(const PlanarMap& f, const ClosingRegion& region, std::size_t k) {
    if (k == 0) throw ParameterError("retract_fixed_point: k must be positive");
    const std::size_t q = region.n * k;
    auto F = [&](Point2 z) { return iterate_point(f, z, q); };
    auto tau = [&](double t) { return region.x0 + t * (region.x1 - region.x0); };
    auto phi = [&](double t) {
        Point2 z = tau(t);
        return region.level(F(z)) - region.level(z);
    };
    RetractionResult res;
    res.degree = fixed_point_degree(f, q, region.R);

    std::string why;
    // level-matching point on the segment x0 -> x1: phi(0) >= 1 > 0 > phi(1)
    const int G = 257;
    std::vector<double> vals(G);
    for (int i = 0; i < G; ++i) vals[static_cast<std::size_t>(i)] = phi(static_cast<double>(i) / (G - 1));
    std::vector<double> seeds_t;
    for (int i = 0; i + 1 < G; ++i) {
        double a = vals[static_cast<std::size_t>(i)], b = vals[static_cast<std::size_t>(i + 1)];
        if (!(std::isfinite(a) && std::isfinite(b))) continue;
        if ((a > 0) != (b > 0)) {
            double lo = static_cast<double>(i) / (G - 1), hi = static_cast<double>(i + 1) / (G - 1);
            const bool pos_lo = a > 0;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                if ((phi(mid) > 0) == pos_lo)
                    lo = mid;
                else
                    hi = mid;
            }
            seeds_t.push_back(0.5 * (lo + hi));
        }
    }
    for (double t : seeds_t) {
        // F(tau(t)) has the right level and sits in the thin strip F(R)
        Point2 seed = F(tau(t));
        if (!is_finite(seed)) continue;
        auto o = refine_in_region(f, region, seed, q, why);
        if (!o) o = refine_in_region(f, region, tau(t), q, why);
        if (o) {
            res.orbit = *o;
            res.seed_level = region.level(tau(t));
            return res;
        }
    }
    if (seeds_t.empty()) why = "no level crossing on the segment x0 -> x1";

    // quadtree fallback: cells inside R with non-zero degree seed Newton
    const BBox b = bounding_box(region.R);
    for (int depth = 1; depth <= 4; ++depth) {
        const int g = 1 << depth;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                double x0 = b.xmin + (b.xmax - b.xmin) * i / g, x1 = b.xmin + (b.xmax - b.xmin) * (i + 1) / g;
                double y0 = b.ymin + (b.ymax - b.ymin) * j / g, y1 = b.ymin + (b.ymax - b.ymin) * (j + 1) / g;
                Polyline cell{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
                bool inside = std::all_of(cell.begin(), cell.end(), [&](Point2 p) { return point_in_polygon(region.R, p); });
                if (!inside) continue;
                auto deg = fixed_point_degree(f, q, cell);
                if (!deg || *deg == 0) continue;
                std::string w;
                auto o = refine_in_region(f, region, {0.5 * (x0 + x1), 0.5 * (y0 + y1)}, q, w);
                if (o) {
                    res.orbit = *o;
                    res.from_quadtree = true;
                    return res;
                }
            }
    }
    throw NumericalError("retract_fixed_point: " + why);
}

// ---------------------------------------------------------------------------
// registry

bool PeriodicRegistry::add(const PlanarMap& f, const PeriodicOrbit& o) {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& g : orbits_) {
        if (g.q != o.q) continue;
        Point2 z = o.p;
        for (std::size_t i = 0; i < o.q; ++i, z = apply(f, z))
            if (dist(z, g.p) < 1e-6) return false;
    }
    orbits_.push_back(o);
    std::sort(orbits_.begin(), orbits_.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.q != b.q) return a.q < b.q;
        if (a.p.x != b.p.x) return a.p.x < b.p.x;
        return a.p.y < b.p.y;
    });
    return true;
}

std::vector<PeriodicOrbit> PeriodicRegistry::orbits() const {
    std::lock_guard<std::mutex> lock(mu_);
    return orbits_;
}

std::size_t PeriodicRegistry::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return orbits_.size();
}

double PeriodicRegistry::distance(const PlanarMap& f, Point2 p) const {
    std::lock_guard<std::mutex> lock(mu_);
    double best = kInf;
    for (const auto& g : orbits_) {
        Point2 z = g.p;
        for (std::size_t i = 0; i < g.q; ++i, z = apply(f, z)) best = std::min(best, dist(z, p));
    }
    return best;
}

// ---------------------------------------------------------------------------
// pipeline

ClosingContext closing_context(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                               const ClosingOptions& opt) {
    if (opt.max_m == 0) throw ParameterError("closing_context: max_m must be positive");
    ClosingContext ctx;
    const Polyline support = subsample(mu.samples, 4000);
    for (std::size_t m = 1; m <= opt.max_m; ++m) {
        try {
            ctx.discs.emplace_back(image_disc(f, S, m));
            const Polyline bd = subsample(ctx.discs.back()->boundary(), 4000);
            ctx.hausdorff.push_back(support.empty() ? kInf
                                                    : std::max(directed_hausdorff(bd, support),
                                                               directed_hausdorff(support, bd)));
        } catch (const GeometryError&) {
            ctx.discs.emplace_back(std::nullopt);
            ctx.hausdorff.push_back(kInf);
        }
    }
    for (std::size_t m = 1; m <= opt.max_m; ++m)
        if (ctx.hausdorff[m - 1] < opt.delta / 2) {
            ctx.m0 = m;
            ctx.hausdorff_met = true;
            break;
        }
    if (!ctx.m0)
        for (std::size_t m = opt.max_m; m >= 1; --m)
            if (ctx.discs[m - 1]) {
                ctx.m0 = m;
                break;
            }
    if (!ctx.m0) throw GeometryError("closing_context: no image disc could be built");
    return ctx;
}

ClosingSample close_sample(const PlanarMap& f, const TrappingRegion& S, const ClosingContext& ctx, Point2 x,
                           const ClosingOptions& opt) {
    ClosingSample r;
    r.x = x;
    const double delta = opt.delta;

    // periodic sample: x is its own return
    {
        Point2 z = x;
        for (std::size_t q = 1; q <= 64; ++q) {
            z = apply(f, z);
            if (dist(z, x) < 1e-9) {
                auto o = newton_periodic(f, {x}, q);
                if (o && dist(o->p, x) < delta) {
                    r.closed = true;
                    r.degenerate = true;
                    r.orbit = *o;
                    r.distance = dist(o->p, x);
                    r.n = q;
                    r.k = 1;
                } else {
                    r.note = "periodic sample but Newton refinement failed";
                }
                return r;
            }
        }
    }

    const std::size_t need = orbit_need(opt.sd);
    const std::size_t window = 100000;  // search horizon for x0
    auto orbit = iterate(f, x, window + opt.max_return + need);
    if (orbit.overflow) {
        r.note = "orbit escaped";
        return r;
    }
    auto sub = [&](std::size_t j) {
        OrbitSegment s;
        s.points.assign(orbit.points.begin() + static_cast<std::ptrdiff_t>(j),
                        orbit.points.begin() + static_cast<std::ptrdiff_t>(j + need + 1));
        return s;
    };
    auto both_exit = [](const BranchAttempt& a) { return a.branches && a.branches->exit_plus && a.branches->exit_minus; };

    std::vector<std::size_t> m_order;
    for (std::size_t m = ctx.m0; m <= ctx.discs.size(); ++m) m_order.push_back(m);
    for (std::size_t m = ctx.m0; m-- > 1;) m_order.push_back(m);

    // failed certificates are cheap and common; only certified candidates count
    std::size_t cert_attempts = 0, visits = 0, pairs = 0;
    std::string last = "no certified orbit point with both branches exiting near the sample";
    for (std::size_t j = 0; j < window && cert_attempts < opt.max_candidates && visits < 50 * opt.max_candidates &&
                            pairs < opt.max_pairs;
         ++j) {
        const Point2 x0 = orbit.points[j];
        if (dist(x0, x) > delta / 4) continue;
        ++visits;
        auto a0 = branches_at(f, S, sub(j), opt.constants, opt.sd);
        if (!a0.certified) continue;
        ++cert_attempts;
        if (!both_exit(a0)) continue;
        const double target = delta - dist(x0, x);
        // returns of x0 within delta/2 whose own branches exit
        std::size_t tried_returns = 0;
        for (std::size_t n = 1; n <= opt.max_return && pairs < opt.max_pairs && tried_returns < 4; ++n) {
            const Point2 x1 = orbit.points[j + n];
            if (dist(x1, x0) >= delta / 2) continue;
            ++tried_returns;
            auto a1 = branches_at(f, S, sub(j + n), opt.constants, opt.sd);
            if (!both_exit(a1)) {
                last = "return x1 = f^" + std::to_string(n) + "(x0) lacks exiting branches";
                continue;
            }
            ++pairs;
            std::optional<ClosingRegion> region;
            for (std::size_t m : m_order) {
                if (!ctx.discs[m - 1]) continue;
                try {
                    region = build_region(*ctx.discs[m - 1], m, x0, n, *a0.branches, *a1.branches, target);
                    break;
                } catch (const std::exception& e) {
                    last = std::string("region: ") + e.what();
                }
            }
            if (!region) continue;
            try {
                std::size_t k = first_exit_k(f, *region, opt.max_k);
                if (n * k > opt.max_period) {
                    last = "period n k = " + std::to_string(n * k) + " above the refinement ceiling";
                    continue;
                }
                auto ret = retract_fixed_point(f, *region, k);
                double d = dist(ret.orbit.p, x);
                if (!(d < delta)) {
                    last = "fixed point farther than delta from the sample";
                    continue;
                }
                r.closed = true;
                r.orbit = ret.orbit;
                r.distance = d;
                r.n = n;
                r.k = k;
                r.m = region->m;
                r.region_diameter = region->diameter;
                r.degree = ret.degree;
                r.note = ret.from_quadtree ? "quadtree seed" : "";
                return r;
            } catch (const std::exception& e) {
                last = e.what();
            }
        }
    }
    r.note = last;
    return r;
}

DensityReport periodic_density_report(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                                      std::size_t budget, const ClosingOptions& opt, PeriodicRegistry* registry) {
    if (!(opt.delta > 0)) throw ParameterError("periodic_density_report: delta must be positive");
    DensityReport rep;
    rep.delta = opt.delta;
    if (mu.samples.empty() || budget == 0) return rep;
    auto cycle = measure_cycle(f, mu);
    auto idx = sample_indices(cycle ? *cycle : mu.size(), budget);
    // a cycle of length < budget is sampled repeatedly, round robin
    if (cycle && idx.size() < budget) {
        std::vector<std::size_t> rr;
        for (std::size_t i = 0; i < budget; ++i) rr.push_back(i % *cycle);
        idx = rr;
    }
    ClosingContext ctx = closing_context(f, S, mu, opt);
    rep.samples.resize(idx.size());
    parallel_for(idx.size(), opt.threads, [&](std::size_t i) {
        rep.samples[i] = close_sample(f, S, ctx, mu.samples[idx[i]], opt);
        rep.samples[i].index = idx[i];
    });
    PeriodicRegistry local;
    PeriodicRegistry& reg = registry ? *registry : local;
    for (const auto& s : rep.samples)
        if (s.closed) {
            ++rep.closed;
            reg.add(f, s.orbit);
            rep.max_period = std::max(rep.max_period, s.orbit.q);
        }
    std::size_t covered = 0;
    for (const auto& s : rep.samples)
        if (reg.distance(f, s.x) < opt.delta) ++covered;
    rep.success_fraction = static_cast<double>(rep.closed) / static_cast<double>(rep.samples.size());
    rep.coverage_fraction = static_cast<double>(covered) / static_cast<double>(rep.samples.size());
    rep.orbits = reg.orbits();
    return rep;
}

}  // namespace sdiss
