// One PASS/FAIL line per acceptance criterion; INFO lines carry context that
// is not itself a criterion. Exit status 1 when any criterion fails.
#include <mpfr.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "sdiss/closing.hpp"
#include "sdiss/errors.hpp"
#include "sdiss/io.hpp"
#include "sdiss/random.hpp"
#include "sdiss/tree.hpp"

using namespace sdiss;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    failures += !pass;
}
void info(const std::string& name, const std::string& detail) {
    std::cout << "INFO " << name << ": " << detail << std::endl;
}

template <class Fn>
double timed(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string g(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

// ---------------------------------------------------------------------------

void jacobian_identity() {
    double worst = 0;
    for (double b : {0.1, -0.05, 0.2}) {
        std::vector<PlanarMap> maps{HenonMap{1.4, b}, Extension2D{QuadraticMap{-1.5}, b, 0.05},
                                    Extension2D{ArnoldMap{0.1, 0.3}, b, 0.05}};
        for (const auto& f : maps)
            for (int i = 0; i < 100; ++i)
                for (int j = 0; j < 100; ++j) {
                    Point2 p{-2 + 4 * i / 99.0, -2 + 4 * j / 99.0};
                    worst = std::max(worst, std::abs(jacobian(f, p).det() - b));
                }
    }
    report(worst <= 1e-14, "jacobian identity", "max |det Df - b| = " + g(worst) + " on 100x100 grids");
}

void conjugacy() {
    double e1 = 0, e2 = 0;
    double t = timed([&] {
        e1 = conjugacy_check(-1.5, 0.1);
        e2 = conjugacy_check(-1.2, -0.05);
    });
    report(e1 < 1e-10 && e2 < 1e-10 && t < 1, "conjugacy",
           "errors " + g(e1) + ", " + g(e2) + " in " + g(t) + " s");
}

void lyapunov_sum() {
    LyapunovEstimate l;
    double t = timed([&] { l = lyapunov(HenonMap{1.4, 0.1}, {0.1, 0.0}, 100000, 1000); });
    double err = std::abs(l.lambda_minus + l.lambda_plus - std::log(0.1));
    report(err < 1e-3 && t < 5, "lyapunov sum", "error " + g(err) + " in " + g(t) + " s");
}

// every window starting at j has mean <= alpha3, summed directly
std::vector<std::size_t> pliss_oracle(const std::vector<double>& a, double alpha3) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < a.size(); ++j) {
        bool ok = true;
        long double s = 0;
        for (std::size_t n = j + 1; n <= a.size() && ok; ++n) {
            s += a[n - 1];
            ok = s / static_cast<long double>(n - j) <= alpha3;
        }
        if (ok) out.push_back(j);
    }
    return out;
}

void pliss() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1, 1), G(0.05, 1.0);
    std::uniform_int_distribution<int> L(1, 200);
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> a(L(rng));
        double mean = 0, lo = 0;
        for (auto& x : a) mean += (x = U(rng)), lo = std::min(lo, x);
        mean /= a.size();
        PlissParams p{lo - 1e-6, mean + 1e-9, mean + G(rng)};
        if (pliss_times(a, p).indices != pliss_oracle(a, p.alpha3)) ++mismatches;
    }
    // i.i.d. inputs of length 1e5 from three laws
    double worst = 1;
    std::normal_distribution<double> N(0, 1);
    std::bernoulli_distribution B(0.5);
    for (int law = 0; law < 3; ++law) {
        std::vector<double> a(100000);
        for (auto& x : a) x = law == 0 ? U(rng) : law == 1 ? std::clamp(N(rng), -4.0, 4.0) : (B(rng) ? 1.0 : -1.0);
        double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
        double lo = *std::min_element(a.begin(), a.end());
        PlissParams p{lo - 1e-9, mean + 1e-12, mean + 0.5};
        double bound = (p.alpha3 - p.alpha2) / (p.alpha3 - p.alpha1);
        worst = std::min(worst, pliss_times(a, p).density - (bound - 0.02));
    }
    report(mismatches == 0 && worst >= 0, "pliss oracle equivalence",
           std::to_string(mismatches) + " mismatches on 1000 arrays; min density slack " + g(worst));
}

void p1_arithmetic() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    mpfr_t D, m, lhs, mid, rhs, t;
    mpfr_inits2(256, D, m, lhs, mid, rhs, t, (mpfr_ptr)0);
    int valid = 0, chain = 0, agree = 0;
    for (int i = 0; i < 20000; ++i) {
        double d = std::pow(10.0, -8 * U(rng));
        double mm = std::pow(10.0, -8 * U(rng));
        if (!(d < 1)) continue;
        mpfr_set_d(D, d, MPFR_RNDN);
        mpfr_set_d(m, mm, MPFR_RNDN);
        // valid: D < m^{9/10}
        mpfr_set_ui(t, 9, MPFR_RNDN);
        mpfr_div_ui(t, t, 10, MPFR_RNDN);
        mpfr_pow(t, m, t, MPFR_RNDN);
        if (!mpfr_less_p(D, t)) continue;
        ++valid;
        // m^3 D^{-51/20} > D^{47/60} > D^{4/5}
        mpfr_pow_ui(lhs, m, 3, MPFR_RNDN);
        mpfr_set_si(t, -51, MPFR_RNDN);
        mpfr_div_ui(t, t, 20, MPFR_RNDN);
        mpfr_pow(t, D, t, MPFR_RNDN);
        mpfr_mul(lhs, lhs, t, MPFR_RNDN);
        mpfr_set_ui(t, 47, MPFR_RNDN);
        mpfr_div_ui(t, t, 60, MPFR_RNDN);
        mpfr_pow(mid, D, t, MPFR_RNDN);
        mpfr_set_ui(t, 4, MPFR_RNDN);
        mpfr_div_ui(t, t, 5, MPFR_RNDN);
        mpfr_pow(rhs, D, t, MPFR_RNDN);
        bool holds = mpfr_greater_p(lhs, mid) && mpfr_greater_p(mid, rhs);
        chain += holds;
        auto c = p1_constants(d, mm);
        agree += c.valid && p1_chain_holds(c) == holds;
    }
    mpfr_clears(D, m, lhs, mid, rhs, t, (mpfr_ptr)0);
    Rational b = Rational(9, 14) + Rational(9, 17) - Rational(1, 1);
    bool rational = b == Rational(41, 238) && p1_density_bound() == b && Rational(1, 6) < b;
    report(valid > 1000 && chain == valid && agree == valid && rational, "p1 arithmetic",
           std::to_string(chain) + "/" + std::to_string(valid) + " valid pairs hold at 256 bits, library agrees on " +
               std::to_string(agree) + "; 9/14 + 9/17 - 1 = 41/238 > 1/6");
}

struct Saddle {
    PlanarMap f;
    Point2 p, v;
    double ls, lu;
};

Saddle henon_saddle(double b) {
    HenonMap h{1.4, b};
    Saddle s{h, henon_fixed_points(h).first, {}, 0, 0};
    Mat2 J = jacobian(s.f, s.p);
    auto ev = J.eigenvalues();
    double e0 = ev[0].real(), e1 = ev[1].real();
    if (std::abs(e0) > std::abs(e1)) std::swap(e0, e1);
    s.ls = std::log(std::abs(e0));
    s.lu = std::log(std::abs(e1));
    s.v = eigenvector(J, e0);
    return s;
}

void chart_calculus() {
    // (i) diag(s, u): A_n and B_n are geometric sums
    int linear_bad = 0;
    double linear_err = 0;
    for (auto [s, u] : {std::pair{0.3, 2.0}, std::pair{0.05, 3.0}, std::pair{0.5, 1.5}}) {
        PlanarMap f = AffineMap{Mat2::diag(s, u), {}};
        auto c = lyapunov_constants(std::log(s), std::log(u), 0.1);
        auto rates = choose_rates(c);
        auto cs = chart_sequence(f, iterate(f, {0, 0}, 4000), c, rates, 50, 40);
        const double q = s / rates.lambda1, r = s / (rates.lambda2 * u);
        for (std::size_t n = 0; n <= 50; ++n) {
            double A = (1 - std::pow(q, double(cs.T - n + 1))) / (1 - q);
            double B = (1 - std::pow(r, double(n + 1))) / (1 - r);
            linear_err = std::max({linear_err, std::abs(cs.A[n] / A - 1), std::abs(cs.B[n] / B - 1)});
        }
        linear_bad += !check_chart(cs).ok(1e-9);
    }
    // (ii) certified Henon windows: fixed saddles, and certified points on the b = -0.1 attractor
    int windows = 0, bad = 0;
    double worst = 0;
    auto tally = [&](const ChartSequence& cs) {
        auto ck = check_chart(cs);
        ++windows;
        bad += !ck.ok(1e-9);
        worst = std::max({worst, ck.recursion_A, ck.recursion_B});
    };
    for (double b : {0.05, 0.1, 0.2}) {
        auto sd = henon_saddle(b);
        auto c = lyapunov_constants(sd.ls, sd.lu, 0.2);
        OrbitSegment o;
        o.points.assign(800, sd.p);
        tally(chart_sequence(sd.f, o, c, choose_rates(c), 50, 40));
    }
    PlanarMap f = HenonMap{1.4, -0.1};
    auto ly = lyapunov(f, {0.1, 0.0}, 100000, 1000);
    auto c = lyapunov_constants(ly.lambda_minus, ly.lambda_plus, 0.3);
    auto mu = birkhoff_measure(f, {0.1, 0.0}, 20000, 1000);
    SDOptions opt;
    const std::size_t len = orbit_need(opt);
    int chaotic = 0;
    for (std::size_t i = 0; i < mu.size() && chaotic < 10; i += 97) {
        auto orbit = iterate(f, mu.samples[i], len);
        auto td = tangent_data(f, orbit, len - opt.n_back, opt.n_back);
        if (!certify(td, c, 50).pass) continue;
        try {
            tally(chart_sequence(f, td, c, choose_rates(c), 50));
            ++chaotic;
        } catch (const ParameterError&) {
            // certified on [0, N] but not up to the truncation index
        }
    }
    report(linear_bad == 0 && linear_err < 1e-12 && bad == 0 && chaotic >= 5, "chart calculus",
           "linear closed forms to " + g(linear_err) + "; " + std::to_string(windows - bad) + "/" +
               std::to_string(windows) + " certified windows (" + std::to_string(chaotic) +
               " on the b = -0.1 attractor), worst recursion residual " + g(worst));
}

void stable_curve() {
    bool ok = true;
    std::string detail;
    for (double b : {0.05, 0.1, 0.2}) {
        auto sd = henon_saddle(b);
        auto c = lyapunov_constants(sd.ls, sd.lu, 0.2);
        OrbitSegment o;
        o.points.assign(800, sd.p);
        auto cs = chart_sequence(sd.f, o, c, choose_rates(c), 50, 40);
        auto curve = local_stable_curve(sd.f, cs);
        double ang = line_angle(curve.E, sd.v);
        bool dec = curve.forward_lengths.size() == 51;
        for (std::size_t n = 1; n < curve.forward_lengths.size(); ++n)
            dec = dec && curve.forward_lengths[n] < curve.forward_lengths[n - 1];
        ok = ok && ang < 1e-4 && dec;
        detail += std::string(detail.empty() ? "" : "; ") + "b=" + g(b) + ": angle " + g(ang) +
                  (dec ? ", decreasing" : ", NOT decreasing");
    }
    report(ok, "stable curve at a saddle", detail);
}

void strong_dissipation() {
    for (double b : {0.05, 0.1, 0.2}) {
        PlanarMap f = HenonMap{1.4, b};
        auto S = henon_trapping_region(1.4, b);
        PooledVerdict pv;
        double t = timed([&] { pv = verify_on_periodic_orbits(f, S, 12, 40, 0.2); });
        std::string orbits;
        for (const auto& ov : pv.orbits)
            orbits += " q" + std::to_string(ov.orbit.q) + (ov.orbit.saddle() ? "s" : ov.orbit.sink() ? "k" : "o");
        report(pv.decided >= 1 && pv.fraction >= 0.95 && t < 300, "strong dissipation b=" + g(b),
               std::to_string(pv.both_exit) + "/" + std::to_string(pv.decided) + " decided samples with both branches exiting (" +
                   std::to_string(pv.certified) + " certified) over orbits" + orbits + " in " + g(t) + " s");
    }
    // context: the Birkhoff measure of a measure with a positive exponent
    PlanarMap f = HenonMap{1.4, -0.1};
    auto S = henon_trapping_region(1.4, -0.1);
    auto ly = lyapunov(f, {0.1, 0.0}, 100000, 1000);
    SDOptions o;
    o.sample_k = 40;
    SDVerdict v;
    double t = timed([&] {
        v = verify_strong_dissipation(f, S, birkhoff_measure(f, {0.1, 0.0}, 20000, 1000),
                                      lyapunov_constants(ly.lambda_minus, ly.lambda_plus, 0.3), o);
    });
    info("strong dissipation b=-0.1 birkhoff", std::to_string(v.both_exit) + "/" + std::to_string(v.decided) +
                                                   " decided, " + std::to_string(v.certified) + "/40 certified, " +
                                                   g(t) + " s");
}

struct ClosingRun {
    DensityReport rep;
    std::size_t verified = 0;  // closed samples passing the independent re-check
};

ClosingRun run_closing(double b, double delta, std::size_t budget, PeriodicRegistry& reg) {
    PlanarMap f = HenonMap{1.4, b};
    auto S = henon_trapping_region(1.4, b);
    auto ly = lyapunov(f, {0.1, 0.0}, 100000, 1000);
    ClosingOptions opt;
    opt.delta = delta;
    opt.constants = lyapunov_constants(ly.lambda_minus, std::max(ly.lambda_plus, 0.0), 0.3);
    ClosingRun r;
    r.rep = periodic_density_report(f, S, birkhoff_measure(f, {0.1, 0.0}, 20000, 1000), budget, opt, &reg);
    for (const auto& s : r.rep.samples)
        if (s.closed && dist(iterate_point(f, s.orbit.p, s.orbit.q), s.orbit.p) < 1e-8 && dist(s.orbit.p, s.x) < delta)
            ++r.verified;
    return r;
}

void closing() {
    PeriodicRegistry reg;
    std::vector<std::size_t> maxp;
    ClosingRun main;
    double t = timed([&] {
        for (double d : {0.1, 0.05, 0.02}) {
            auto r = run_closing(0.1, d, 100, reg);
            maxp.push_back(r.rep.max_period);
            if (d == 0.05) main = r;
        }
    });
    bool residuals = main.verified == main.rep.closed;
    bool success = main.rep.success_fraction >= 0.8;
    bool grows = maxp[0] < maxp[1] && maxp[1] < maxp[2];
    report(residuals && success && grows, "closing b=0.1",
           std::to_string(main.verified) + "/" + std::to_string(main.rep.closed) +
               " closed samples re-verified; success " + g(main.rep.success_fraction) +
               "; max period over delta 0.1, 0.05, 0.02: " + std::to_string(maxp[0]) + ", " + std::to_string(maxp[1]) +
               ", " + std::to_string(maxp[2]) + (grows ? "" : " (not strictly increasing)") + "; " + g(t) + " s");

    PeriodicRegistry reg2;
    ClosingRun chaos;
    double t2 = timed([&] { chaos = run_closing(-0.1, 0.05, 16, reg2); });
    info("closing b=-0.1", std::to_string(chaos.verified) + "/" + std::to_string(chaos.rep.closed) + " re-verified, " +
                               std::to_string(chaos.rep.closed) + "/16 closed, max period " +
                               std::to_string(chaos.rep.max_period) + ", " + g(t2) + " s");
}

// g^q(t) - t for g(x) = x^2 - 2 in double; adequate for q <= 12
double h1(std::size_t q, double t) {
    double x = t;
    for (std::size_t i = 0; i < q; ++i) x = x * x - 2;
    return x - t;
}

// brute force: some g^q - id, q <= 12, changes sign within delta of x0
bool sign_change_near(double x0, double delta) {
    for (std::size_t q = 1; q <= 12; ++q) {
        double prev = h1(q, x0 - delta);
        for (int i = 1; i <= 4000; ++i) {
            double cur = h1(q, x0 - delta + 2 * delta * i / 4000.0);
            if ((prev < 0) != (cur < 0)) return true;
            prev = cur;
        }
    }
    return false;
}

// root = 2 cos(theta) is q-periodic iff theta (2^q -+ 1) / (2 pi) is an integer
bool chebyshev_periodic(const std::string& root, std::size_t q, long bits) {
    mpfr_t x, th, pi, k, tmp;
    mpfr_inits2(bits + 64, x, th, pi, k, tmp, (mpfr_ptr)0);
    mpfr_set_str(x, root.c_str(), 10, MPFR_RNDN);
    mpfr_div_ui(x, x, 2, MPFR_RNDN);
    mpfr_acos(th, x, MPFR_RNDN);
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_mul_ui(pi, pi, 2, MPFR_RNDN);
    bool ok = false;
    for (int sgn : {-1, 1}) {
        mpfr_set_ui(k, 2, MPFR_RNDN);
        mpfr_pow_ui(k, k, q, MPFR_RNDN);
        if (sgn < 0)
            mpfr_sub_ui(k, k, 1, MPFR_RNDN);
        else
            mpfr_add_ui(k, k, 1, MPFR_RNDN);
        mpfr_mul(tmp, th, k, MPFR_RNDN);
        mpfr_div(tmp, tmp, pi, MPFR_RNDN);
        mpfr_round(k, tmp);
        mpfr_sub(tmp, tmp, k, MPFR_RNDN);
        ok = ok || std::abs(mpfr_get_d(tmp, MPFR_RNDN)) < 1e-6;
    }
    mpfr_clears(x, th, pi, k, tmp, (mpfr_ptr)0);
    return ok;
}

void closing_1d() {
    Map1D g1 = QuadraticMap{-2.0};
    const double delta = 1e-2;
    CounterRng rng(1);
    int found = 0, within = 0, certified = 0, oracle = 0, agree = 0;
    std::size_t maxq = 0;
    double t = timed([&] {
        for (int i = 0; i < 20; ++i) {
            double x = rng.uniform(i, -2.0, 2.0);
            for (int k = 0; k < 100; ++k) x = x * x - 2;  // a point of the orbit, recurrent for Lebesgue-a.e. seed
            auto o = interval_periodic_near(g1, x, delta, 20000);
            bool bf = sign_change_near(x, delta);
            oracle += bf;
            if (!o) {
                agree += !bf;
                continue;
            }
            ++found;
            agree += bf;
            within += std::abs(o->p - x) < delta;
            certified += chebyshev_periodic(o->root, o->period, o->precision_bits);
            maxq = std::max(maxq, o->period);
        }
    });
    report(found == 20 && within == 20 && certified == 20 && agree == 20, "1d closing",
           std::to_string(found) + "/20 found, " + std::to_string(within) + " within 1e-2, " +
               std::to_string(certified) + " confirmed by the closed form, sign-change oracle agrees on " +
               std::to_string(agree) + " (oracle positive " + std::to_string(oracle) + "), periods up to " +
               std::to_string(maxq) + ", " + g(t) + " s");
}

bool connected(const RealTree& t) {
    std::vector<std::size_t> up(t.vertices.size());
    std::iota(up.begin(), up.end(), 0);
    auto find = [&](std::size_t v) {
        while (up[v] != v) v = up[v] = up[up[v]];
        return v;
    };
    for (auto [a, b] : t.edges) up[find(a)] = find(b);
    std::set<std::size_t> roots;
    for (std::size_t v = 0; v < up.size(); ++v) roots.insert(find(v));
    return roots.size() == 1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

int cli(const std::vector<std::string>& args) {
    std::vector<std::string> a{"sdiss"};
    a.insert(a.end(), args.begin(), args.end());
    std::ostringstream out, err;
    int code = app::run(a, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

void tree_reduction(const fs::path& runs) {
    // ladder: prefixes of a 20-arc family of stable arcs at b = -0.1
    PlanarMap f = HenonMap{1.4, -0.1};
    auto S = henon_trapping_region(1.4, -0.1);
    Disc D = image_disc(f, S, 1);
    auto ly = lyapunov(f, {0.1, 0.0}, 100000, 1000);
    auto c = lyapunov_constants(ly.lambda_minus, ly.lambda_plus, 0.3);
    auto mu = birkhoff_measure(f, {0.1, 0.0}, 20000, 1000);
    ArcOptions opt;
    opt.preimage_rounds = 0;
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < mu.size(); i += 97) pts.push_back(mu.samples[i]);
    auto fam = collect_arcs(f, S, D, 20, seeds_from_points(f, pts, c, opt.sd), opt);
    bool ladder = fam.size() == 20;
    std::string detail;
    for (std::size_t k : {1u, 5u, 20u}) {
        ArcFamily sub;
        sub.D = fam.D;
        sub.arcs.assign(fam.arcs.begin(), fam.arcs.begin() + static_cast<std::ptrdiff_t>(std::min(k, fam.size())));
        sub.parent.assign(sub.arcs.size(), std::nullopt);
        sub.base.assign(fam.base.begin(), fam.base.begin() + static_cast<std::ptrdiff_t>(sub.arcs.size()));
        sub.seeds = sub.arcs.size();
        auto t = build_tree(sub);
        bool ok = t.vertices.size() == t.edges.size() + 1 && connected(t) && t.vertices.size() == 2 * k + 1;
        ladder = ladder && ok;
        detail += std::to_string(k) + " arcs: V=" + std::to_string(t.vertices.size()) +
                  " E=" + std::to_string(t.edges.size()) + (ok ? "" : " BAD") + "; ";
    }

    // preimage-closed family of the affine contraction (x, y) -> (x/2 + 1/4, y/2)
    PlanarMap toy = AffineMap{Mat2::diag(0.5, 0.5), {0.25, 0.0}};
    ArcFamily cf;
    cf.D = Disc({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
    for (double x : {0.5, 0.53, 0.45}) {
        auto ch = clip_chord(cf.D, {x, 0}, {{x, 0}, {x, 2}}, {{x, 0}, {x, -2}});
        if (ch) add_arc(cf, *ch, {x, 0}, std::nullopt);
    }
    cf.seeds = cf.size();
    bool closed = close_under_preimages(toy, cf, 10, 2e-3, false);
    auto ct = build_tree(cf);
    auto tm = induced_map(ct, cf, toy, 100, 1);
    auto sc = check_semiconjugacy(ct, cf, tm, toy, 10000, 1);
    bool flags = closed && tm.flags() == 0 && sc.disagreements == 0;
    detail += "closed family (" + std::to_string(cf.size()) + " arcs): flags " + std::to_string(tm.flags()) +
              ", disagreements " + std::to_string(sc.disagreements) + "/" + std::to_string(sc.tested) + "; ";

    // tent-like reduction through the CLI
    fs::path dir = runs / "tent_entropy";
    int code = cli({"reduce", "--config", std::string(SDISS_CONFIG_DIR) + "/tent.cfg", "--out", dir.string()});
    double et = NAN, ep = NAN;
    if (code == 0) {
        auto j = Json::parse(slurp(dir / "reduce.json"));
        et = j["entropy"]["tree"].get<double>();
        ep = j["entropy"]["plane"].get<double>();
        info("tent reduction", "arcs " + j["arcs"].dump() + ", V-E " + j["euler"].dump() + ", flags " +
                                   j["flags"].dump() + ", disagreements " +
                                   j["semiconjugacy"]["disagreements"].dump() + "/" +
                                   j["semiconjugacy"]["tested"].dump() + ", plane entropy " + g(ep));
    }
    bool entropy = code == 0 && std::abs(et - std::log(2.0)) < 0.1;
    detail += "tent entropy " + g(et) + " vs log 2 = " + g(std::log(2.0));
    report(ladder && flags && entropy, "tree reduction", detail);
}

// every command twice with the same seed, payload files compared byte for byte
void determinism(const fs::path& runs) {
    const std::string cfg = SDISS_CONFIG_DIR;
    struct Cmd {
        std::string tag;
        std::vector<std::string> args;
    };
    const std::vector<Cmd> cmds = {
        {"simulate", {"simulate", "--config", cfg + "/henon.cfg"}},
        {"lyapunov", {"lyapunov", "--config", cfg + "/henon.cfg"}},
        {"pliss", {"pliss", "--config", cfg + "/henon.cfg"}},
        {"stable", {"stable", "--config", cfg + "/henon.cfg"}},
        {"verify-sd", {"verify-sd", "--config", cfg + "/henon.cfg"}},
        {"close", {"close", "--config", cfg + "/henon.cfg", "--set", "deltas=0.1 0.05 0.02", "budget=100"}},
        {"close1d", {"close", "--config", cfg + "/quadratic.cfg"}},
        {"reduce-tent", {"reduce", "--config", cfg + "/tent.cfg"}},
        {"reduce-henon", {"reduce", "--config", cfg + "/henon_reduce.cfg"}},
    };
    std::size_t compared = 0;
    std::vector<std::string> diffs;
    for (const auto& c : cmds) {
        std::vector<fs::path> dirs;
        for (const char* run : {"a", "b", "threads2"}) {
            fs::path d = runs / "determinism" / run / c.tag;
            fs::remove_all(d);
            auto args = c.args;
            args.insert(args.end(), {"--seed", "1", "--out", d.string()});
            if (std::string(run) == "threads2") args.insert(args.end(), {"--threads", "2"});
            if (cli(args) != 0) diffs.push_back(c.tag + " (run " + run + " failed)");
            dirs.push_back(d);
        }
        auto files = Json::parse(slurp(dirs[0] / ("manifest_" + c.args[0] + ".json")))["files"];
        for (const auto& fj : files) {
            const std::string name = fj.get<std::string>();
            const std::string ref = slurp(dirs[0] / name);
            for (std::size_t k = 1; k < dirs.size(); ++k) {
                ++compared;
                if (slurp(dirs[k] / name) != ref) diffs.push_back(c.tag + "/" + name + (k == 2 ? " (2 threads)" : ""));
            }
        }
    }
    std::string detail = std::to_string(compared) + " file comparisons over " + std::to_string(cmds.size()) +
                         " commands (same seed; second run and a 2-thread run)";
    for (const auto& d : diffs) detail += "; differs: " + d;
    report(diffs.empty() && compared > 0, "determinism", detail);
}

}  // namespace

int main(int argc, char** argv) {
    fs::path runs = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sdiss_acceptance";
    fs::create_directories(runs);
    std::vector<std::function<void()>> steps = {
        jacobian_identity, conjugacy, lyapunov_sum, pliss, p1_arithmetic, chart_calculus, stable_curve,
        strong_dissipation, closing, closing_1d, [&] { tree_reduction(runs); }, [&] { determinism(runs); },
    };
    for (auto& s : steps) {
        try {
            s();
        } catch (const std::exception& e) {
            report(false, "step aborted", e.what());
        }
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
