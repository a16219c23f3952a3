#include "sdiss/stable_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "sdiss/errors.hpp"

namespace sdiss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

double log_sum_exp(const std::vector<double>& v) {
    double mx = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace

void check_rates(const CertificateConstants& c, ChartRates r) {
    if (!(r.lambda1 > c.sigma && r.lambda1 < 1.0)) throw ParameterError("chart rates: lambda1 must lie in (sigma, 1)");
    if (!(r.lambda2 > 0.0 && r.lambda2 < c.rho_tilde))
        throw ParameterError("chart rates: lambda2 must lie in (0, rho_tilde)");
    if (!(c.sigma_tilde * r.lambda2 / (r.lambda1 * c.rho) > r.lambda1))
        throw ParameterError("chart rates: sigma_tilde lambda2 / (lambda1 rho) must exceed lambda1");
}

ChartRates choose_rates(const CertificateConstants& c) {
    if (!c.ordered()) throw ParameterError("choose_rates: constants not ordered");
    const double P = c.pinching();
    if (!(P > c.sigma))
        throw ParameterError("choose_rates: pinching violated (" + std::to_string(P) + " <= sigma = " +
                             std::to_string(c.sigma) + ")");
    // theta P > sigma keeps the admissible lambda1-interval non-empty
    double theta = std::max(0.9, std::sqrt(c.sigma / P));
    ChartRates r;
    r.lambda2 = theta * c.rho_tilde;
    double hi = std::min(1.0, std::sqrt(c.sigma_tilde * r.lambda2 / c.rho));
    r.lambda1 = std::sqrt(c.sigma * hi);
    check_rates(c, r);
    return r;
}

double ChartSequence::m(std::size_t n) const { return std::exp(log_m.at(n)); }
double ChartSequence::M(std::size_t n) const { return std::exp(log_M.at(n)); }

std::vector<double> cumulative_log_m(const TangentData& td) {
    std::vector<double> lm(td.count() + 1, 0.0);
    for (std::size_t j = 0; j < td.count(); ++j) lm[j + 1] = lm[j] + td.log_stretch[j];
    return lm;
}

ChartSequence chart_sequence(const PlanarMap& f, const TangentData& td, const CertificateConstants& c, ChartRates rates,
                             std::size_t N, double eps_chart) {
    if (N == 0) throw ParameterError("chart_sequence: N must be positive");
    if (!c.ordered()) throw ParameterError("chart_sequence: constants not ordered");
    if (!c.pinched())
        throw ParameterError("chart_sequence: pinching violated (" + std::to_string(c.pinching()) +
                             " <= sigma = " + std::to_string(c.sigma) + ")");
    check_rates(c, rates);
    if (!(eps_chart > 0)) throw ParameterError("chart_sequence: eps_chart must be positive");
    if (td.count() < N + 1) throw ParameterError("chart_sequence: tangent data shorter than the window");

    ChartSequence cs;
    cs.N = N;
    cs.lambda1 = rates.lambda1;
    cs.lambda2 = rates.lambda2;
    cs.constants = c;
    auto hd = holder_data(f);
    cs.C_f = hd.C_f;
    cs.alpha = hd.alpha;
    cs.eps_chart = eps_chart;
    const double q1 = c.sigma / rates.lambda1;
    cs.C0 = 1.001 * std::max(1.0 / (1.0 - q1), 1.0 / (1.0 - rates.lambda2 / c.rho_tilde));

    const auto lm = cumulative_log_m(td);

    // common truncation index: tail (sigma^n/m_n) q1^{T-n+1} / (1 - q1) < 1e-12 for all n <= N+1
    const double lq = std::log(q1), target = std::log(1e-12) + std::log1p(-q1);
    double need = static_cast<double>(N + 1);
    for (std::size_t n = 0; n <= N + 1; ++n) {
        double dn = static_cast<double>(n);
        double excess = dn * std::log(c.sigma) - lm[n];
        need = std::max(need, dn - 1.0 + (target - excess) / lq);
    }
    cs.T = static_cast<std::size_t>(std::ceil(need));
    if (cs.T > td.count())
        throw ParameterError("chart_sequence: truncation index " + std::to_string(cs.T) +
                             " exceeds the tangent data (" + std::to_string(td.count()) + ")");
    auto cert = certify(td, c, cs.T);
    if (!cert.pass)
        throw ParameterError("chart_sequence: certificate fails at n = " + std::to_string(cert.first_fail_n.value_or(0)));

    cs.log_m.assign(lm.begin(), lm.begin() + static_cast<std::ptrdiff_t>(N + 2));
    cs.log_M.resize(N + 2);
    double ld = 0.0;
    for (std::size_t n = 0; n <= N + 1; ++n) {
        cs.log_M[n] = ld - lm[n];
        if (n <= N) ld += td.log_det[n];
    }
    cs.points.assign(td.points.begin(), td.points.begin() + static_cast<std::ptrdiff_t>(N + 2));
    cs.dirs.assign(td.dirs.begin(), td.dirs.begin() + static_cast<std::ptrdiff_t>(N + 2));

    const double ll1 = std::log(rates.lambda1), ll2 = std::log(rates.lambda2);
    cs.A.resize(N + 2);
    cs.B.resize(N + 2);
    for (std::size_t n = 0; n <= N + 1; ++n) {
        double s = 0.0;  // terms decrease geometrically, plain summation is fine
        for (std::size_t k = 0; n + k <= cs.T; ++k) s += std::exp(-static_cast<double>(k) * ll1 + lm[n + k] - lm[n]);
        cs.A[n] = s;
        std::vector<double> terms;
        terms.reserve(n + 1);
        const double gn = cs.log_M[n] - lm[n];
        for (std::size_t k = 0; k <= n; ++k)
            terms.push_back((static_cast<double>(k) - static_cast<double>(n)) * ll2 + (cs.log_M[k] - lm[k]) - gn);
        cs.B[n] = std::exp(log_sum_exp(terms));
    }

    for (std::size_t n = 0; n <= N; ++n) {
        Mat2 L = jacobian(f, td.points[n]);
        Point2 e = td.dirs[n], fp = perp(e), e1 = td.dirs[n + 1], f1 = perp(e1);
        double c_raw = dot(L * fp, f1), d_raw = dot(L * fp, e1);
        cs.a.push_back(cs.A[n + 1] * std::exp(lm[n + 1] - lm[n]) / cs.A[n]);
        cs.c.push_back(cs.A[n + 1] * cs.B[n + 1] * c_raw / (cs.A[n] * cs.B[n]));
        cs.d.push_back(cs.A[n + 1] * d_raw / (cs.A[n] * cs.B[n]));
        cs.r.push_back(cs.C_f > 0 ? std::pow(eps_chart / (cs.C_f * cs.A[n + 1] * cs.B[n + 1]), 1.0 / cs.alpha) : kInf);
    }
    return cs;
}

ChartSequence chart_sequence(const PlanarMap& f, const OrbitSegment& orbit, const CertificateConstants& c,
                             ChartRates rates, std::size_t N, std::size_t n_back, double eps_chart) {
    if (orbit.length() < n_back + N + 2) throw ParameterError("chart_sequence: orbit too short");
    auto td = tangent_data(f, orbit, orbit.length() - n_back, n_back);
    return chart_sequence(f, td, c, rates, N, eps_chart);
}

ChartCheck check_chart(const ChartSequence& cs) {
    ChartCheck ck;
    const auto& c = cs.constants;
    auto slack = [](double x) { return 1e-12 * (1.0 + std::abs(x)); };
    for (std::size_t n = 0; n <= cs.N; ++n) {
        double mr = std::exp(cs.log_m[n + 1] - cs.log_m[n]);
        double Mr = std::exp(cs.log_M[n + 1] - cs.log_M[n]);
        double lhsA = cs.A[n + 1] * mr / cs.A[n];
        double rhsA = cs.lambda1 * (cs.A[n] - 1.0) / cs.A[n];
        ck.recursion_A = std::max(ck.recursion_A, std::abs(lhsA - rhsA) / std::abs(rhsA));
        double lhsB = cs.B[n + 1] * Mr / cs.B[n];
        double rhsB = mr / cs.lambda2 + Mr / cs.B[n];
        ck.recursion_B = std::max(ck.recursion_B, std::abs(lhsB - rhsB) / std::abs(rhsB));
        if (!(std::abs(cs.a[n]) < cs.lambda1)) ck.bound_a = false;
        if (!(std::abs(cs.c[n]) > std::abs(cs.a[n]) / cs.lambda2)) ck.bound_c = false;
    }
    for (std::size_t n = 0; n <= cs.N + 1; ++n) {
        double dn = static_cast<double>(n);
        double la = std::log(cs.C0) + dn * (std::log(cs.lambda1) - std::log(c.sigma_tilde));
        if (std::log(cs.A[n]) > la + slack(la)) ck.uniform_A = false;
        double lb = std::log(cs.C0) + dn * (std::log(c.rho) - std::log(cs.lambda2));
        if (std::log(cs.B[n]) > lb + slack(lb)) ck.uniform_B = false;
    }
    return ck;
}

// ---------------------------------------------------------------------------
// Chebyshev graphs

std::vector<double> ChebGraph::nodes(int n, double half) {
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) u[static_cast<std::size_t>(j)] = half * std::cos(std::numbers::pi * j / (n - 1));
    return u;
}

ChebGraph::ChebGraph(double half, std::vector<double> vals) : half_(half) {
    const int n = static_cast<int>(vals.size());
    if (n < 2) throw ParameterError("ChebGraph: need at least two nodes");
    const int K = n - 1;
    c_.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k <= K; ++k) {
        double s = 0.0;
        for (int j = 0; j <= K; ++j) {
            double w = (j == 0 || j == K) ? 0.5 : 1.0;
            s += w * vals[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi * j * k / K);
        }
        c_[static_cast<std::size_t>(k)] = 2.0 * s / K;
    }
    c_[0] *= 0.5;
    c_[static_cast<std::size_t>(K)] *= 0.5;
    dc_.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = K; k >= 1; --k) {
        double next = (k + 1 <= K) ? dc_[static_cast<std::size_t>(k + 1)] : 0.0;
        dc_[static_cast<std::size_t>(k - 1)] = next + 2.0 * k * c_[static_cast<std::size_t>(k)];
    }
    dc_[0] *= 0.5;
}

namespace {

double clenshaw(const std::vector<double>& c, double t) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        double b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

}  // namespace

double ChebGraph::operator()(double u) const { return half_ > 0 ? clenshaw(c_, u / half_) : 0.0; }
double ChebGraph::deriv(double u) const { return half_ > 0 ? clenshaw(dc_, u / half_) / half_ : 0.0; }

double ChebGraph::length(double u0, double u1) const {
    // composite Simpson, 128 panels
    const int n = 128;
    const double h = (u1 - u0) / n;
    auto g = [&](double u) { return std::hypot(1.0, deriv(u)); };
    double s = g(u0) + g(u1);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(u0 + i * h);
    return std::abs(s * h / 3.0);
}

// ---------------------------------------------------------------------------
// Graph transform

namespace {

struct Solve {
    bool ok = false;
    double v = 0.0;
};

// v with f(x_n + u e + v fp) on the graph of phi1 in the next frame.
// f(x_n) - x_{n+1}; rounding-level defects (cycle points from Newton) are
// dropped, otherwise they swamp the sub-ulp chart domains deep in the window.
Point2 step_defect(const PlanarMap& f, Point2 xn, Point2 xn1) {
    Point2 d = apply(f, xn) - xn1;
    if (norm(d) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, norm(xn1))) return {0.0, 0.0};
    return d;
}

Solve solve_node(const PlanarMap& f, Point2 xn, Point2 xn1, Point2 defect, Point2 e, Point2 e1, double u,
                 const ChebGraph& phi1, double rho, double guess) {
    const Point2 fp = perp(e), f1 = perp(e1);
    auto G = [&](double v, double* dG) -> std::optional<double> {
        Point2 w = u * e + v * fp;
        Point2 D = displacement(f, xn, w) + defect;
        double u1 = dot(D, e1), v1 = dot(D, f1);
        if (!std::isfinite(u1) || std::abs(u1) > phi1.half() * (1.0 + 1e-9)) return std::nullopt;
        if (dG) {
            Point2 Jf = jacobian(f, xn + w) * fp;
            *dG = dot(Jf, f1) - phi1.deriv(u1) * dot(Jf, e1);
        }
        return v1 - phi1(u1);
    };
    (void)xn1;
    double v = guess;
    for (int it = 0; it < 20; ++it) {
        double dG = 0.0;
        auto g = G(v, &dG);
        if (!g || dG == 0.0 || !std::isfinite(dG)) break;
        double step = *g / dG;
        v -= step;
        if (!std::isfinite(v)) break;
        if (std::abs(step) <= 1e-12 * rho) {
            auto chk = G(v, nullptr);
            if (chk) return {true, v};
            break;
        }
    }
    // bisection on the ordinate
    double lo = -rho, hi = rho;
    auto glo = G(lo, nullptr), ghi = G(hi, nullptr);
    if (!glo || !ghi || (*glo > 0) == (*ghi > 0)) return {};
    for (int it = 0; it < 200 && hi - lo > 1e-15 * rho; ++it) {
        double mid = 0.5 * (lo + hi);
        auto gm = G(mid, nullptr);
        if (!gm) return {};
        if ((*gm > 0) == (*glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return {true, 0.5 * (lo + hi)};
}

}  // namespace

std::vector<ChebGraph> graph_transform(const PlanarMap& f, const Frames& fr, std::size_t start, std::size_t window,
                                       double r0, int nodes, double eta) {
    const std::size_t end = start + window;
    if (end >= fr.points.size() || end >= fr.log_m.size()) throw ParameterError("graph_transform: window exceeds data");
    std::vector<ChebGraph> graphs(window + 1);
    // the margin grows along the window so each image lands inside the next domain
    auto rho = [&](std::size_t n) {
        double grow = 1.0 + 0.5 * static_cast<double>(n - start) / static_cast<double>(window);
        return r0 * grow * std::exp(fr.log_m[n] - fr.log_m[start]);
    };
    graphs[window] = ChebGraph(rho(end), std::vector<double>(static_cast<std::size_t>(nodes), 0.0));
    for (std::size_t n = end; n-- > start;) {
        const double rn = rho(n);
        const Point2 xn = fr.points[n], xn1 = fr.points[n + 1];
        const Point2 defect = step_defect(f, xn, xn1);
        const auto& phi1 = graphs[n + 1 - start];
        auto us = ChebGraph::nodes(nodes, rn);
        std::vector<double> vs(us.size());
        double guess = 0.0;
        for (std::size_t j = 0; j < us.size(); ++j) {
            auto s = solve_node(f, xn, xn1, defect, fr.dirs[n], fr.dirs[n + 1], us[j], phi1, rn, guess);
            if (!s.ok) return {};
            vs[j] = s.v;
            guess = s.v;
        }
        ChebGraph g(rn, std::move(vs));
        for (double u : ChebGraph::nodes(2 * nodes, rn))
            if (!(std::abs(g.deriv(u)) <= eta)) return {};
        graphs[n - start] = std::move(g);
    }
    return graphs;
}

StableCurve local_stable_curve(const PlanarMap& f, const ChartSequence& cs, const CurveOptions& opt) {
    if (!(opt.eta > 0)) throw ParameterError("local_stable_curve: eta must be positive");
    StableCurve sc;
    sc.x = cs.points[0];
    double r0 = std::min(opt.r0_max, cs.r[0] / (cs.A[0] * cs.B[0]));
    Frames fr{cs.points, cs.dirs, cs.log_m};
    std::vector<ChebGraph> graphs;
    for (;;) {
        if (r0 < opt.r0_min)
            throw NumericalError("local_stable_curve: radius fell below " + fmt_g(opt.r0_min) +
                                 " without keeping the graph in the cone");
        graphs = graph_transform(f, fr, 0, cs.N, r0, opt.nodes, opt.eta);
        if (!graphs.empty()) break;
        r0 *= 0.5;
        ++sc.halvings;
    }
    sc.r0 = r0;
    const Point2 e0 = cs.dirs[0], f0 = perp(e0);
    sc.E = normalized(e0 + graphs[0].deriv(0.0) * f0);
    const int ns = std::max(opt.samples, 3);
    for (int i = 0; i < ns; ++i) {
        double u = -r0 + 2.0 * r0 * i / (ns - 1);
        sc.points.push_back(sc.x + u * e0 + graphs[0](u) * f0);
    }
    sc.s = arclength(sc.points);

    double up = r0, um = -r0;
    for (std::size_t n = 0; n <= cs.N; ++n) {
        const Point2 e = cs.dirs[n], fp = perp(e);
        const auto& g = graphs[n];
        sc.forward_lengths.push_back(g.length(um, up));
        Point2 wp = up * e + g(up) * fp, wm = um * e + g(um) * fp;
        sc.ends_plus.push_back(cs.points[n] + wp);
        sc.ends_minus.push_back(cs.points[n] + wm);
        if (n == cs.N) break;
        const Point2 defect = step_defect(f, cs.points[n], cs.points[n + 1]);
        up = dot(displacement(f, cs.points[n], wp) + defect, cs.dirs[n + 1]);
        um = dot(displacement(f, cs.points[n], wm) + defect, cs.dirs[n + 1]);
    }
    sc.lambda = -std::log(cs.lambda1);
    for (std::size_t n = 0; n < sc.forward_lengths.size(); ++n)
        sc.C = std::max(sc.C, sc.forward_lengths[n] * std::exp(sc.lambda * static_cast<double>(n)));
    return sc;
}

bool f_of_S_membership(const PlanarMap& f, const TrappingRegion& S, Point2 p) {
    if (!invertible(f)) throw NotInvertibleError("f_of_S_membership: map is not invertible");
    Point2 q = apply_inverse(f, p);
    return is_finite(q) && S.contains(q);
}

// ---------------------------------------------------------------------------
// Global branches

namespace {

struct BranchSample {
    double u;
    Point2 p;
    bool inside;
};

struct BranchResult {
    Polyline pts;
    bool crossed = false;
    bool exit = false;
};

Point2 pull_back(const PlanarMap& f, Point2 p, std::size_t n) {
    for (std::size_t i = 0; i < n && is_finite(p); ++i) {
        p = apply_inverse(f, p);
        if (norm(p) > escape_radius) return {kInf, kInf};
    }
    return p;
}

double turn(Point2 a, Point2 b, Point2 c) {
    Point2 u = b - a, v = c - b;
    double nu = norm(u), nv = norm(v);
    if (nu == 0 || nv == 0) return 0.0;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

// One branch: u from 0 to u_end (sign gives the side), P(u) = f^{-n}(x_n + u e + phi(u) fp).
BranchResult grow_one(const PlanarMap& f, const TrappingRegion& S, Point2 x0, Point2 xn, Point2 e, const ChebGraph& phi,
                      std::size_t n, double u_end, const GrowOptions& opt) {
    const Point2 fp = perp(e);
    auto P = [&](double u) { return pull_back(f, xn + u * e + phi(u) * fp, n); };
    auto make = [&](double u) {
        Point2 p = P(u);
        return BranchSample{u, p, is_finite(p) && S.contains(p)};
    };
    std::vector<BranchSample> pts;
    const int init = 16;
    for (int i = 0; i <= init; ++i) pts.push_back(make(u_end * i / init));

    auto first_out = [&]() {
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (!pts[i].inside) return i;
        return pts.size();
    };
    bool capped = false;
    for (int pass = 0; pass < 60; ++pass) {
        std::size_t fo = first_out();
        std::size_t lim = std::min(fo, pts.size() - 1);  // segments [i, i+1] with i < lim
        std::vector<std::size_t> split;
        for (std::size_t i = 0; i < lim; ++i) {
            bool need = dist(pts[i].p, pts[i + 1].p) > opt.h_max;
            if (!need && i + 2 <= lim && turn(pts[i].p, pts[i + 1].p, pts[i + 2].p) > opt.max_turn) need = true;
            if (!need && i >= 1 && turn(pts[i - 1].p, pts[i].p, pts[i + 1].p) > opt.max_turn) need = true;
            if (need && std::abs(pts[i + 1].u - pts[i].u) > 1e-15 * std::abs(u_end)) split.push_back(i);
        }
        if (split.empty()) break;
        if (pts.size() + split.size() > opt.max_points) {
            capped = true;
            break;
        }
        std::vector<BranchSample> next;
        next.reserve(pts.size() + split.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            next.push_back(pts[i]);
            if (k < split.size() && split[k] == i) {
                next.push_back(make(0.5 * (pts[i].u + pts[i + 1].u)));
                ++k;
            }
        }
        pts = std::move(next);
    }
    if (capped) throw NumericalError("grow_branches: resampling exceeded the point budget");

    BranchResult res;
    std::size_t fo = first_out();
    res.pts.push_back(x0);
    if (fo == 0) {  // x_n's own pullback left S: cannot happen for a trapped orbit
        throw NumericalError("grow_branches: base point is not inside S");
    }
    // pts[0] is the pullback of x_n itself, i.e. x0 up to rounding; x0 stands in for it
    for (std::size_t i = 1; i < fo; ++i)
        if (dist(pts[i].p, res.pts.back()) > 0) res.pts.push_back(pts[i].p);
    if (fo < pts.size()) {
        double lo = pts[fo - 1].u, hi = pts[fo].u;
        Point2 last = pts[fo - 1].p;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            auto s = make(mid);
            if (s.inside) {
                lo = mid;
                last = s.p;
            } else {
                hi = mid;
            }
        }
        if (dist(last, res.pts.back()) > 0) res.pts.push_back(last);
        res.crossed = true;
        res.exit = !f_of_S_membership(f, S, last);
    }
    return res;
}

}  // namespace

StableBranchPair grow_branches(const PlanarMap& f, const TangentData& td, const TrappingRegion& S,
                               const GrowOptions& opt) {
    if (!invertible(f)) throw NotInvertibleError("grow_branches: map is not invertible");
    if (td.count() < opt.max_pullbacks + opt.window)
        throw ParameterError("grow_branches: tangent data shorter than max_pullbacks + window");
    const auto lm = cumulative_log_m(td);
    Frames fr{td.points, td.dirs, lm};
    StableBranchPair out;
    out.x = td.points[0];
    if (!S.contains(out.x)) throw DomainError("grow_branches: base point outside S");
    bool have_plus = false, have_minus = false;
    for (std::size_t n = 0; n <= opt.max_pullbacks; ++n) {
        double r0 = opt.r0;
        std::vector<ChebGraph> g;
        for (int h = 0; h < 40 && g.empty(); ++h, r0 *= 0.5) g = graph_transform(f, fr, n, opt.window, r0, opt.nodes, opt.eta);
        if (g.empty()) throw NumericalError("grow_branches: local curve construction failed at n = " + std::to_string(n));
        r0 *= 2.0;  // undo the last halving of the loop increment
        out.pullbacks = n;
        if (!have_plus) {
            auto b = grow_one(f, S, out.x, td.points[n], td.dirs[n], g[0], n, r0, opt);
            out.plus = std::move(b.pts);
            out.exit_plus = b.exit;
            have_plus = b.crossed;
        }
        if (!have_minus) {
            auto b = grow_one(f, S, out.x, td.points[n], td.dirs[n], g[0], n, -r0, opt);
            out.minus = std::move(b.pts);
            out.exit_minus = b.exit;
            have_minus = b.crossed;
        }
        if (have_plus && have_minus) break;
    }
    if (polyline_self_intersects(out.plus) || polyline_self_intersects(out.minus) ||
        polylines_intersect(out.plus, out.minus, true))
        throw GeometryError("grow_branches: branch polylines intersect (numerical breakdown)");
    return out;
}

}  // namespace sdiss
