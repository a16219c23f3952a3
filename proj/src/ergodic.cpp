#include "sdiss/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sdiss/errors.hpp"

namespace sdiss {

OrbitSegment iterate(const PlanarMap& f, Point2 p, std::size_t n) {
    OrbitSegment seg;
    seg.points.reserve(n + 1);
    seg.points.push_back(p);
    for (std::size_t i = 0; i < n; ++i) {
        p = apply(f, p);
        if (!is_finite(p) || norm(p) > escape_radius) {
            seg.overflow = true;
            break;
        }
        seg.points.push_back(p);
    }
    return seg;
}

double orbit_defect(const PlanarMap& f, const OrbitSegment& seg) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < seg.points.size(); ++i) {
        Point2 q = apply(f, seg.points[i]);
        worst = std::max(worst, dist(q, seg.points[i + 1]) / std::max(1.0, norm(q)));
    }
    return worst;
}

LyapunovEstimate lyapunov(const PlanarMap& f, Point2 p, std::size_t n, std::size_t burn) {
    if (n == 0) throw ParameterError("lyapunov: n must be positive");
    Point2 q1{1.0, 0.0}, q2{0.0, 1.0};
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < burn + n; ++i) {
        Mat2 J = jacobian(f, p);
        Point2 v1 = J * q1, v2 = J * q2;
        double r11 = norm(v1);
        q1 = v1 / r11;
        v2 -= dot(q1, v2) * q1;
        double r22 = norm(v2);
        q2 = v2 / r22;
        if (i >= burn) {
            s1 += std::log(r11);
            s2 += std::log(r22);
        }
        p = apply(f, p);
        if (!is_finite(p) || norm(p) > escape_radius) throw NumericalError("lyapunov: orbit escaped");
    }
    double l1 = s1 / static_cast<double>(n), l2 = s2 / static_cast<double>(n);
    return {std::min(l1, l2), std::max(l1, l2), n, burn};
}

EmpiricalMeasure birkhoff_measure(const PlanarMap& f, Point2 p, std::size_t n, std::size_t burn) {
    EmpiricalMeasure mu;
    mu.burn = burn;
    for (std::size_t i = 0; i < burn; ++i) {
        p = apply(f, p);
        if (!is_finite(p) || norm(p) > escape_radius) throw NumericalError("birkhoff_measure: orbit escaped");
    }
    auto seg = iterate(f, p, n);
    if (seg.overflow) throw NumericalError("birkhoff_measure: orbit escaped");
    mu.samples = std::move(seg.points);
    return mu;
}

EmpiricalMeasure periodic_measure(const PlanarMap& f, Point2 p, std::size_t q) {
    if (q == 0) throw ParameterError("periodic_measure: period must be positive");
    EmpiricalMeasure mu;
    for (std::size_t i = 0; i < q; ++i) {
        mu.samples.push_back(p);
        p = apply(f, p);
    }
    return mu;
}

namespace {

std::optional<std::pair<std::size_t, std::size_t>> naive_return(const std::vector<Point2>& pts, double delta) {
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (dist(pts[i], pts[j]) < delta) return std::pair{i, j - i};
    return std::nullopt;
}

struct CellKey {
    long long ix, iy;
    bool operator==(const CellKey&) const = default;
};
struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        return std::hash<long long>()(k.ix * 73856093LL ^ k.iy * 19349663LL);
    }
};

std::optional<std::pair<std::size_t, std::size_t>> hashed_return(const std::vector<Point2>& pts, double delta) {
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
    auto key = [delta](Point2 p) {
        return CellKey{static_cast<long long>(std::floor(p.x / delta)), static_cast<long long>(std::floor(p.y / delta))};
    };
    for (std::size_t i = 0; i < pts.size(); ++i) grid[key(pts[i])].push_back(i);  // lists are sorted
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CellKey k = key(pts[i]);
        std::size_t best = 0;
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({k.ix + dx, k.iy + dy});
                if (it == grid.end()) continue;
                const auto& v = it->second;
                for (auto jt = std::upper_bound(v.begin(), v.end(), i); jt != v.end(); ++jt) {
                    if (best != 0 && *jt >= best) break;
                    if (dist(pts[i], pts[*jt]) < delta) {
                        best = *jt;
                        break;
                    }
                }
            }
        if (best != 0) return std::pair{i, best - i};
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> find_recurrent_return(const OrbitSegment& seg, double delta) {
    if (!(delta > 0)) throw ParameterError("find_recurrent_return: delta must be positive");
    if (seg.points.size() <= 10000) return naive_return(seg.points, delta);
    return hashed_return(seg.points, delta);
}

const char* to_string(OrbitTag t) {
    switch (t) {
        case OrbitTag::Escapes: return "Escapes";
        case OrbitTag::ConvergesToFixedPoint: return "ConvergesToFixedPoint";
        case OrbitTag::EntersTrappingRegion: return "EntersTrappingRegion";
        case OrbitTag::Undecided: return "Undecided";
    }
    return "?";
}

std::pair<Point2, Point2> henon_fixed_points(const HenonMap& m) {
    // a x^2 + (1 + b) x - 1 = 0
    double B = 1.0 + m.b;
    double disc = B * B + 4.0 * m.a;
    if (disc < 0 || m.a == 0.0) throw ParameterError("henon_fixed_points: no real fixed points");
    double s = std::sqrt(disc);
    double q = -0.5 * (B + std::copysign(s, B));
    double x1 = q / m.a, x2 = -1.0 / q;  // product of roots is -1/a
    if (x1 < x2) std::swap(x1, x2);
    return {Point2{x1, -m.b * x1}, Point2{x2, -m.b * x2}};
}

Point2 henon_outer_fixed_point(const HenonMap& m) { return henon_fixed_points(m).second; }

bool in_escape_cone(Point2 p) { return std::abs(p.x) > std::abs(p.y) && std::abs(p.x) > 3.0; }

OrbitClass classify_orbit(const HenonMap& m, Point2 p, std::size_t maxiter) {
    return classify_orbit(m, p, maxiter, TrappingRegion::henon_rectangle(m.a));
}

OrbitClass classify_orbit(const HenonMap& m, Point2 p, std::size_t maxiter, const TrappingRegion& S) {
    if (!(m.a > 1.0 && m.a < 2.0) || m.b == 0.0) throw ParameterError("classify_orbit: needs a in (1,2), b != 0");
    Point2 pf = henon_outer_fixed_point(m);
    for (std::size_t i = 0; i <= maxiter; ++i) {
        if (!is_finite(p) || norm(p) > escape_radius || in_escape_cone(p)) return {OrbitTag::Escapes, i};
        if (S.contains(p)) return {OrbitTag::EntersTrappingRegion, i};
        if (dist(p, pf) < 1e-9 * std::max(1.0, norm(pf))) return {OrbitTag::ConvergesToFixedPoint, i};
        p = apply(m, p);
    }
    return {OrbitTag::Undecided, maxiter};
}

}  // namespace sdiss
