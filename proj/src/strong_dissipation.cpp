#include "sdiss/strong_dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdiss/errors.hpp"
#include "sdiss/parallel.hpp"

namespace sdiss {

DissipationReport check_dissipation2(const PlanarMap& f, const TrappingRegion& S, int grid_n) {
    if (grid_n < 2) throw ParameterError("check_dissipation2: grid_n must be at least 2");
    DissipationReport r;
    r.grid_n = grid_n;
    r.inf_conorm_pow = std::numeric_limits<double>::infinity();
    r.inf_angles_pow = std::numeric_limits<double>::infinity();
    const BBox& b = S.box();
    std::array<Point2, 64> dirs;
    for (int k = 0; k < 64; ++k) {
        double th = std::numbers::pi * k / 64;
        dirs[static_cast<std::size_t>(k)] = {std::cos(th), std::sin(th)};
    }
    bool any = false;
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= grid_n; ++j) {
            Point2 p{b.xmin + (b.xmax - b.xmin) * i / grid_n, b.ymin + (b.ymax - b.ymin) * j / grid_n};
            if (!(S.signed_distance(p) >= 0.0)) continue;
            any = true;
            Mat2 J = jacobian(f, p);
            r.sup_det = std::max(r.sup_det, std::abs(J.det()));
            r.inf_conorm_pow = std::min(r.inf_conorm_pow, std::pow(J.singular_values()[1], 0.9));
            for (auto u : dirs) r.inf_angles_pow = std::min(r.inf_angles_pow, std::pow(norm(J * u), 0.9));
        }
    if (!any) throw ParameterError("check_dissipation2: no grid point in the region");
    r.margin = r.inf_conorm_pow - r.sup_det;
    return r;
}

std::optional<std::size_t> measure_cycle(const PlanarMap& f, const EmpiricalMeasure& mu, std::size_t max_q, double tol) {
    const auto& s = mu.samples;
    if (s.empty()) return std::nullopt;
    for (std::size_t q = 1; q <= max_q && q <= s.size(); ++q) {
        bool periodic = dist(apply(f, s[q - 1]), s[0]) < tol;
        for (std::size_t i = 0; i + q < s.size() && periodic; ++i) periodic = dist(s[i], s[i + q]) < tol;
        if (periodic) return q;
    }
    return std::nullopt;
}

std::optional<SinkInfo> sink_support(const PlanarMap& f, const EmpiricalMeasure& mu, std::size_t max_q, double tol) {
    auto q = measure_cycle(f, mu, max_q, tol);
    if (!q) return std::nullopt;
    Mat2 M = Mat2::identity();
    for (std::size_t i = 0; i < *q; ++i) M = jacobian(f, mu.samples[i]) * M;
    double rho = M.spectral_radius();
    if (rho < 1.0) return SinkInfo{*q, rho};
    return std::nullopt;
}

std::vector<std::size_t> sample_indices(std::size_t size, std::size_t k) {
    std::vector<std::size_t> idx;
    if (size == 0 || k == 0) return idx;
    if (k >= size) {
        for (std::size_t i = 0; i < size; ++i) idx.push_back(i);
        return idx;
    }
    for (std::size_t i = 0; i < k; ++i) idx.push_back(i * size / k);
    return idx;
}

BranchAttempt branches_at(const PlanarMap& f, const TrappingRegion& S, const OrbitSegment& orbit,
                          const CertificateConstants& c, const SDOptions& opt) {
    BranchAttempt r;
    const std::size_t count = orbit_need(opt) - opt.n_back;
    if (orbit.overflow || orbit.length() < count + opt.n_back) {
        r.note = "orbit escaped";
        return r;
    }
    auto td = tangent_data(f, orbit, count, opt.n_back);
    auto cert = certify(td, c, opt.N);
    if (!cert.pass) {
        r.note = "not certified (first failure at n = " + std::to_string(cert.first_fail_n.value_or(0)) + ")";
        return r;
    }
    r.certified = true;
    try {
        auto cs = chart_sequence(f, td, c, choose_rates(c), opt.N, opt.eps_chart);
        auto curve = local_stable_curve(f, cs, opt.curve);
        r.r0 = curve.r0;
        GrowOptions g = opt.grow;
        g.r0 = curve.r0;
        r.branches = grow_branches(f, td, S, g);
    } catch (const std::exception& e) {
        r.note = std::string("undecided: ") + e.what();
    }
    return r;
}

std::size_t orbit_need(const SDOptions& opt) {
    return std::max(opt.N + 600, opt.grow.max_pullbacks + opt.grow.window) + opt.n_back;
}

namespace {

// On a periodic measure the orbit is read off the cycle: plain iteration
// drifts off a saddle cycle within ~log(1e16)/lambda+ steps.
SDSample verify_one(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu, std::size_t idx,
                    std::optional<std::size_t> cycle, const CertificateConstants& c, const SDOptions& opt) {
    SDSample r;
    r.p = mu.samples[idx];
    const std::size_t len = orbit_need(opt);
    OrbitSegment orbit;
    if (cycle) {
        for (std::size_t j = 0; j <= len; ++j) orbit.points.push_back(mu.samples[(idx + j) % *cycle]);
    } else {
        orbit = iterate(f, r.p, len);
    }
    auto a = branches_at(f, S, orbit, c, opt);
    r.certified = a.certified;
    r.note = a.note;
    r.r0 = a.r0;
    if (a.branches) {
        const auto& br = *a.branches;
        r.decided = true;
        r.exit_plus = br.exit_plus;
        r.exit_minus = br.exit_minus;
        r.length_plus = br.length_plus();
        r.length_minus = br.length_minus();
        r.pullbacks = br.pullbacks;
    }
    return r;
}

}  // namespace

SDVerdict verify_strong_dissipation(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                                    const CertificateConstants& c, const SDOptions& opt) {
    SDVerdict v;
    if (sink_support(f, mu)) {
        v.sink_supported = true;
        v.vacuous = true;
        return v;
    }
    auto cycle = measure_cycle(f, mu);
    auto idx = sample_indices(cycle ? *cycle : mu.size(), opt.sample_k);
    v.samples.resize(idx.size());
    parallel_for(idx.size(), opt.threads, [&](std::size_t i) {
        v.samples[i] = verify_one(f, S, mu, idx[i], cycle, c, opt);
        v.samples[i].index = idx[i];
    });
    for (const auto& s : v.samples) {
        if (!s.certified) continue;
        ++v.certified;
        if (!s.decided) {
            ++v.undecided;
            continue;
        }
        ++v.decided;
        if (s.exit_plus && s.exit_minus) ++v.both_exit;
    }
    v.vacuous = v.certified == 0;
    v.fraction = v.decided ? static_cast<double>(v.both_exit) / static_cast<double>(v.decided) : 0.0;
    return v;
}

PooledVerdict verify_on_periodic_orbits(const PlanarMap& f, const TrappingRegion& S, std::size_t max_q, int grid_n,
                                        double eps, const SDOptions& opt) {
    PooledVerdict pv;
    for (const auto& o : find_periodic_orbits(f, S, max_q, grid_n)) {
        OrbitVerdict ov;
        ov.orbit = o;
        const double q = static_cast<double>(o.q);
        double l0 = std::log(std::abs(o.multipliers[0])) / q, l1 = std::log(std::abs(o.multipliers[1])) / q;
        ov.lambda_minus = std::min(l0, l1);
        ov.lambda_plus = std::max(l0, l1);
        auto c = lyapunov_constants(ov.lambda_minus, std::max(ov.lambda_plus, 0.0), eps);
        ov.verdict = verify_strong_dissipation(f, S, periodic_measure(f, o.p, o.q), c, opt);
        pv.certified += ov.verdict.certified;
        pv.decided += ov.verdict.decided;
        pv.undecided += ov.verdict.undecided;
        pv.both_exit += ov.verdict.both_exit;
        pv.orbits.push_back(std::move(ov));
    }
    pv.fraction = pv.decided ? static_cast<double>(pv.both_exit) / static_cast<double>(pv.decided) : 0.0;
    return pv;
}

double estimate_Xg(const SDVerdict& v) {
    if (v.samples.empty()) return 0.0;
    return static_cast<double>(v.both_exit) / static_cast<double>(v.samples.size());
}

double estimate_Xg(const PlanarMap& f, const TrappingRegion& S, const EmpiricalMeasure& mu,
                   const CertificateConstants& c, const SDOptions& opt) {
    return estimate_Xg(verify_strong_dissipation(f, S, mu, c, opt));
}

}  // namespace sdiss
