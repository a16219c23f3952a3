#include "sdiss/pliss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdiss/errors.hpp"
#include "sdiss/parallel.hpp"

namespace sdiss {

PlissResult pliss_times(std::span<const double> seq, const PlissParams& p) {
    if (!(p.alpha1 < p.alpha2 && p.alpha2 < p.alpha3)) throw ParameterError("pliss_times: need alpha1 < alpha2 < alpha3");
    PlissResult res;
    const std::size_t L = seq.size();
    if (L == 0) return res;
    double mean = 0.0;
    for (double a : seq) {
        if (!(a > p.alpha1)) throw ParameterError("pliss_times: every term must exceed alpha1");
        mean += a;
    }
    mean /= static_cast<double>(L);
    if (mean > p.alpha2 + 1e-12 * std::max(1.0, std::abs(p.alpha2)))
        throw ParameterError("pliss_times: mean exceeds alpha2");

    std::vector<double> S(L + 1, 0.0);
    for (std::size_t i = 0; i < L; ++i) S[i + 1] = S[i] + (seq[i] - p.alpha3);

    // suffix argmax: best[j] = smallest index of the maximum of S over [j, L]
    std::vector<std::size_t> best(L + 1);
    best[L] = L;
    for (std::size_t j = L; j-- > 0;) best[j] = S[j] >= S[best[j + 1]] ? j : best[j + 1];

    std::size_t n = best[0];
    while (n < L) {
        res.indices.push_back(n);
        n = best[n + 1];
    }
    if (!res.indices.empty())
        res.density = static_cast<double>(res.indices.size()) / static_cast<double>(res.indices.back() + 1);
    return res;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw ParameterError("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rational operator+(Rational a, Rational b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }
Rational operator-(Rational a, Rational b) { return Rational(a.num * b.den - b.num * a.den, a.den * b.den); }
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

Rational p1_density_bound() { return Rational(9, 14) + Rational(9, 17) - Rational(1, 1); }

bool CertificateConstants::ordered() const {
    return sigma_tilde > 0 && sigma_tilde <= sigma && sigma < 1 && rho_tilde > 0 && rho_tilde <= rho && rho < 1;
}

P1Constants p1_constants(double D, double m) {
    if (!(D > 0) || !(m > 0)) throw ParameterError("p1_constants: D and m must be positive");
    if (!(D < 1)) throw ParameterError("p1_constants: needs D < 1");
    P1Constants c;
    c.D = D;
    c.m = m;
    c.sigma_tilde = m;
    c.rho_tilde = m * m / D;
    c.sigma = std::pow(D, 0.8);
    c.rho = std::pow(D, 0.75);
    c.valid = D < std::pow(m, 0.9);
    return c;
}

bool p1_chain_holds(const P1Constants& c) {
    long double D = c.D, m = c.m;
    long double pinch = m * m * m * std::pow(D, -51.0L / 20.0L);
    long double mid = std::pow(D, 47.0L / 60.0L);
    long double sigma = std::pow(D, 0.8L);
    return pinch > mid && mid > sigma;
}

CertificateConstants lyapunov_constants(double lambda_minus, double lambda_plus, double eps) {
    if (!(eps > 0)) throw ParameterError("lyapunov_constants: eps must be positive");
    return {std::exp(lambda_minus + eps), std::exp(lambda_minus - eps), std::exp(lambda_minus - lambda_plus + eps),
            std::exp(lambda_minus - lambda_plus - eps)};
}

JacobianExtrema jacobian_extrema(const PlanarMap& f, const TrappingRegion& S, int grid_n) {
    if (grid_n < 1) throw ParameterError("jacobian_extrema: grid_n must be positive");
    JacobianExtrema e{0.0, std::numeric_limits<double>::infinity(), 0.0};
    const BBox& b = S.box();
    bool any = false;
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= grid_n; ++j) {
            Point2 p{b.xmin + (b.xmax - b.xmin) * i / grid_n, b.ymin + (b.ymax - b.ymin) * j / grid_n};
            if (!S.contains(p)) continue;
            any = true;
            Mat2 J = jacobian(f, p);
            auto sv = J.singular_values();
            e.D = std::max(e.D, std::abs(J.det()));
            e.m = std::min(e.m, sv[1]);
            e.norm = std::max(e.norm, sv[0]);
        }
    if (!any) throw ParameterError("jacobian_extrema: no grid point inside the region");
    return e;
}

namespace {

// Most expanded right singular direction of M (unit), and the ratio s_min/s_max.
std::pair<Point2, double> top_right_singular(const Mat2& M) {
    double p = M.a11 * M.a11 + M.a21 * M.a21;
    double q = M.a11 * M.a12 + M.a21 * M.a22;
    double r = M.a12 * M.a12 + M.a22 * M.a22;
    double th = 0.5 * std::atan2(2.0 * q, p - r);
    auto sv = M.singular_values();
    return {Point2{std::cos(th), std::sin(th)}, sv[0] > 0 ? sv[1] / sv[0] : 1.0};
}

}  // namespace

DirectionEstimate estimate_E(const PlanarMap& f, const OrbitSegment& orbit, std::size_t n_back, std::size_t start) {
    if (n_back == 0) throw ParameterError("estimate_E: n_back must be positive");
    if (orbit.points.size() < start + n_back) throw ParameterError("estimate_E: orbit too short");
    Mat2 M = Mat2::identity();
    DirectionEstimate out{{1.0, 0.0}, true};
    for (std::size_t k = 0; k < n_back; ++k) {
        M = jacobian(f, orbit.points[start + k]) * M;
        double s = M.max_abs();
        if (s == 0.0 || !std::isfinite(s)) throw NumericalError("estimate_E: tangent product degenerated");
        M = M * (1.0 / s);
        auto [u, ratio] = top_right_singular(M);
        if (ratio > 1.0 - 1e-12) {
            out.degenerate = true;  // keep the previous direction
        } else {
            out.E = perp(u);
            out.degenerate = false;
        }
    }
    if (out.E.x < 0 || (out.E.x == 0 && out.E.y < 0)) out.E = -out.E;
    return out;
}

TangentData tangent_data(const PlanarMap& f, const OrbitSegment& orbit, std::size_t count, std::size_t n_back) {
    if (orbit.points.size() < count + n_back + 1) throw ParameterError("tangent_data: orbit too short");
    TangentData td;
    td.points.assign(orbit.points.begin(), orbit.points.begin() + static_cast<std::ptrdiff_t>(count + 1));
    for (std::size_t j = 0; j <= count; ++j) {
        auto d = estimate_E(f, orbit, n_back, j);
        if (d.degenerate) ++td.degenerate_steps;
        Point2 e = d.E;
        if (j > 0) {
            Point2 pushed = jacobian(f, td.points[j - 1]) * td.dirs[j - 1];
            if (dot(pushed, e) < 0) e = -e;
        }
        td.dirs.push_back(e);
    }
    for (std::size_t j = 0; j < count; ++j) {
        Mat2 J = jacobian(f, td.points[j]);
        td.log_stretch.push_back(std::log(norm(J * td.dirs[j])));
        double det = J.det();
        td.log_det.push_back(std::log(std::abs(det)));
        td.det_sign.push_back(det < 0 ? -1.0 : 1.0);
    }
    return td;
}

TangentData tangent_data_along(const PlanarMap& f, const OrbitSegment& orbit, Point2 E, std::size_t count) {
    if (orbit.points.size() < count + 1) throw ParameterError("tangent_data_along: orbit too short");
    TangentData td;
    td.points.assign(orbit.points.begin(), orbit.points.begin() + static_cast<std::ptrdiff_t>(count + 1));
    Point2 e = normalized(E);
    td.dirs.push_back(e);
    for (std::size_t j = 0; j < count; ++j) {
        Mat2 J = jacobian(f, td.points[j]);
        Point2 v = J * e;
        double det = J.det();
        td.log_stretch.push_back(std::log(norm(v)));
        td.log_det.push_back(std::log(std::abs(det)));
        td.det_sign.push_back(det < 0 ? -1.0 : 1.0);
        e = normalized(v);
        td.dirs.push_back(e);
    }
    return td;
}

HyperbolicityCertificate certify(const TangentData& td, const CertificateConstants& c, std::size_t N) {
    if (N > td.count()) throw ParameterError("certify: window longer than the tangent data");
    HyperbolicityCertificate cert;
    cert.x = td.points.front();
    cert.E = td.dirs.front();
    cert.c = c;
    cert.N = N;
    cert.pass_stretch = cert.pass_pinch = true;
    const double ls = std::log(c.sigma), lst = std::log(c.sigma_tilde);
    const double lr = std::log(c.rho), lrt = std::log(c.rho_tilde);
    auto le = [](double a, double b) { return a <= b + 1e-12 * (1.0 + std::abs(a) + std::abs(b)); };
    double L = 0.0, D = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        L += td.log_stretch[n - 1];
        D += td.log_det[n - 1];
        double dn = static_cast<double>(n);
        bool ok_s = le(dn * lst, L) && le(L, dn * ls);
        bool ok_p = le(dn * lrt, 2.0 * L - D) && le(2.0 * L - D, dn * lr);
        if (!ok_s) cert.pass_stretch = false;
        if (!ok_p) cert.pass_pinch = false;
        if ((!ok_s || !ok_p) && !cert.first_fail_n) cert.first_fail_n = n;
    }
    cert.pass = cert.pass_stretch && cert.pass_pinch;
    return cert;
}

HyperbolicityCertificate certify_point(const PlanarMap& f, Point2 p, const CertificateConstants& c, std::size_t N,
                                       std::size_t n_back) {
    auto orbit = iterate(f, p, N + n_back);
    if (orbit.overflow) throw NumericalError("certify_point: orbit escaped");
    return certify(tangent_data(f, orbit, N, n_back), c, N);
}

double block_fraction(const EmpiricalMeasure& mu, const PlanarMap& f, const CertificateConstants& c, std::size_t N,
                      std::size_t n_back, unsigned threads) {
    if (mu.samples.empty()) return 0.0;
    std::vector<char> ok(mu.samples.size(), 0);
    parallel_for(mu.samples.size(), threads, [&](std::size_t i) {
        auto orbit = iterate(f, mu.samples[i], N + n_back);
        if (orbit.overflow) return;
        ok[i] = certify(tangent_data(f, orbit, N, n_back), c, N).pass ? 1 : 0;
    });
    return static_cast<double>(std::count(ok.begin(), ok.end(), 1)) / static_cast<double>(ok.size());
}

CriticalReport critical_fraction(const Extension2D& f, double delta, const EmpiricalMeasure& mu) {
    if (!(delta > 0)) throw ParameterError("critical_fraction: delta must be positive");
    CriticalReport r;
    Interval I = domain(f.h);
    double sup_dh = 0.0, sup_df = 0.0;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
        double x = I.lo + (I.hi - I.lo) * i / n;
        sup_dh = std::max(sup_dh, std::abs(deriv(f.h, x)));
        for (double y : {-f.eps, 0.0, f.eps}) sup_df = std::max(sup_df, jacobian(f, {x, y}).singular_values()[0]);
    }
    r.K = 1.01 * std::max({sup_dh, sup_df, 1.0});
    double lk = 2.0 * std::log(r.K);
    r.choice_lhs = lk / (lk + 0.5 * std::abs(std::log(delta)));
    r.choice_ok = r.choice_lhs < 1.0 / 15.0;
    if (mu.samples.empty()) return r;
    std::size_t inside = 0;
    for (auto p : mu.samples)
        if (std::abs(deriv(f.h, p.x)) <= delta) ++inside;
    r.fraction = static_cast<double>(inside) / static_cast<double>(mu.samples.size());
    if (mu.samples.size() >= 2) {
        r.lambda_plus = lyapunov(f, mu.samples.front(), mu.samples.size() - 1, 0).lambda_plus;
        r.nonnegative_exponent = r.lambda_plus >= -1e-3;
    }
    return r;
}

std::optional<SlopeReport> min_slope(const std::vector<PointDirection>& pts) {
    if (pts.empty()) return std::nullopt;
    SlopeReport r{std::numeric_limits<double>::infinity(), false};
    for (const auto& pd : pts) {
        double s;
        if (pd.E.x == 0.0) {
            s = vertical_slope_sentinel;
            r.vertical = true;
        } else {
            s = std::abs(pd.E.y / pd.E.x);
        }
        r.min_slope = std::min(r.min_slope, s);
    }
    return r;
}

}  // namespace sdiss
