#include "sdiss/periodic.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "sdiss/ergodic.hpp"
#include "sdiss/errors.hpp"

namespace sdiss {

bool PeriodicOrbit::saddle() const {
    double a = std::abs(multipliers[0]), b = std::abs(multipliers[1]);
    return std::min(a, b) < 1.0 && std::max(a, b) > 1.0;
}

bool PeriodicOrbit::sink() const { return std::abs(multipliers[0]) < 1.0 && std::abs(multipliers[1]) < 1.0; }

std::size_t minimal_period(const PlanarMap& f, Point2 p, std::size_t q, double tol) {
    if (q == 0) throw ParameterError("minimal_period: q must be positive");
    for (std::size_t d = 1; d < q; ++d) {
        if (q % d) continue;
        if (dist(iterate_point(f, p, d), p) < tol) return d;
    }
    return q;
}

PeriodicOrbit describe_orbit(const PlanarMap& f, Point2 p, std::size_t q) {
    PeriodicOrbit o;
    o.p = p;
    o.q = minimal_period(f, p, q);
    Mat2 M = Mat2::identity();
    double logdet = 0.0, sgn = 1.0, logscale = 0.0;
    Point2 z = p;
    for (std::size_t i = 0; i < o.q; ++i) {
        Mat2 J = jacobian(f, z);
        double d = J.det();
        logdet += std::log(std::abs(d));
        if (d < 0) sgn = -sgn;
        M = J * M;
        double s = M.max_abs();
        if (s > 0 && std::isfinite(s)) {
            M = M * (1.0 / s);
            logscale += std::log(s);
        }
        z = apply(f, z);
    }
    o.residual = dist(z, p);
    auto ev = M.eigenvalues();
    for (auto& e : ev) e *= std::exp(logscale);
    if (ev[0].imag() == 0.0 && ev[1].imag() == 0.0) {
        // small multiplier from the determinant, free of cancellation
        std::size_t big = std::abs(ev[0]) >= std::abs(ev[1]) ? 0 : 1;
        double large = ev[big].real();
        double small = sgn * std::exp(logdet) / large;
        o.multipliers = {std::complex<double>(small, 0.0), std::complex<double>(large, 0.0)};
    } else {
        o.multipliers = ev;
    }
    if (std::abs(o.multipliers[0]) > std::abs(o.multipliers[1])) std::swap(o.multipliers[0], o.multipliers[1]);
    return o;
}

std::optional<std::vector<Point2>> newton_cycle(const PlanarMap& f, std::vector<Point2> z, std::size_t q,
                                               const NewtonOptions& opt) {
    if (q == 0) throw ParameterError("newton_periodic: q must be positive");
    if (z.size() == 1) {
        while (z.size() < q) z.push_back(apply(f, z.back()));
    }
    if (z.size() != q) throw ParameterError("newton_periodic: guess must have 1 or q points");
    const int n = static_cast<int>(2 * q);
    auto residual = [&](const std::vector<Point2>& w, Eigen::VectorXd& F) {
        F.resize(n);
        double worst = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            Point2 r = apply(f, w[i]) - w[(i + 1) % q];
            if (!is_finite(r)) return std::numeric_limits<double>::infinity();
            F(static_cast<int>(2 * i)) = r.x;
            F(static_cast<int>(2 * i + 1)) = r.y;
            worst = std::max(worst, norm(r));
        }
        return worst;
    };
    Eigen::VectorXd F;
    double res = residual(z, F);
    if (!std::isfinite(res)) return std::nullopt;
    for (int it = 0; it < opt.max_iter && res > opt.tol; ++it) {
        // block bidiagonal plus the closing corner: sparse LU keeps long cycles cheap
        std::vector<Eigen::Triplet<double>> tr;
        tr.reserve(6 * q);
        for (std::size_t i = 0; i < q; ++i) {
            Mat2 D = jacobian(f, z[i]);
            int r = static_cast<int>(2 * i), c = static_cast<int>(2 * i), c1 = static_cast<int>(2 * ((i + 1) % q));
            tr.emplace_back(r, c, D.a11);
            tr.emplace_back(r, c + 1, D.a12);
            tr.emplace_back(r + 1, c, D.a21);
            tr.emplace_back(r + 1, c + 1, D.a22);
            tr.emplace_back(r, c1, -1.0);  // duplicates (q = 1) are summed
            tr.emplace_back(r + 1, c1 + 1, -1.0);
        }
        Eigen::SparseMatrix<double> J(n, n);
        J.setFromTriplets(tr.begin(), tr.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) return std::nullopt;
        Eigen::VectorXd step = lu.solve(-F);
        if (lu.info() != Eigen::Success) return std::nullopt;
        if (!step.allFinite()) return std::nullopt;
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            std::vector<Point2> w(z);
            for (std::size_t i = 0; i < q; ++i)
                w[i] += t * Point2{step(static_cast<int>(2 * i)), step(static_cast<int>(2 * i + 1))};
            Eigen::VectorXd Fw;
            double rw = residual(w, Fw);
            if (rw < res || (ls == 0 && rw <= res)) {
                z = std::move(w);
                F = std::move(Fw);
                res = rw;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (!(res <= std::max(opt.tol, 1e-12)) && !(res < opt.accept)) return std::nullopt;
    return z;
}

std::optional<PeriodicOrbit> newton_periodic(const PlanarMap& f, std::vector<Point2> guess, std::size_t q,
                                             const NewtonOptions& opt) {
    auto cyc = newton_cycle(f, std::move(guess), q, opt);
    if (!cyc) return std::nullopt;
    const auto& z = *cyc;
    // the shooting point with the smallest plain-iteration residual
    std::optional<PeriodicOrbit> best;
    for (std::size_t i = 0; i < q; ++i) {
        auto o = describe_orbit(f, z[i], q);
        if (!best || o.residual < best->residual) best = o;
        if (best->residual < 1e-12) break;
    }
    if (!best || !(best->residual < opt.accept)) return std::nullopt;
    return best;
}

Point2 orbit_representative(const PlanarMap& f, Point2 p, std::size_t q) {
    Point2 best = p, z = p;
    for (std::size_t i = 1; i < q; ++i) {
        z = apply(f, z);
        if (z.x < best.x || (z.x == best.x && z.y < best.y)) best = z;
    }
    return best;
}

std::vector<PeriodicOrbit> find_periodic_orbits(const PlanarMap& f, const TrappingRegion& S, std::size_t max_q,
                                                int grid_n) {
    if (max_q == 0 || grid_n < 1) throw ParameterError("find_periodic_orbits: need max_q >= 1 and grid_n >= 1");
    std::vector<PeriodicOrbit> found;
    const BBox& b = S.box();
    for (std::size_t q = 1; q <= max_q; ++q) {
        for (int i = 0; i < grid_n; ++i)
            for (int j = 0; j < grid_n; ++j) {
                Point2 seed{b.xmin + (b.xmax - b.xmin) * (i + 0.5) / grid_n,
                            b.ymin + (b.ymax - b.ymin) * (j + 0.5) / grid_n};
                if (!S.contains(seed)) continue;
                auto o = newton_periodic(f, {seed}, q);
                if (!o || o->q != q) continue;
                Point2 rep = orbit_representative(f, o->p, q);
                // the whole orbit must lie in S
                bool inside = true;
                Point2 z = rep;
                for (std::size_t k = 0; k < q && inside; ++k, z = apply(f, z)) inside = S.contains(z);
                if (!inside) continue;
                bool dup = std::any_of(found.begin(), found.end(), [&](const PeriodicOrbit& g) {
                    return g.q == q && dist(g.p, rep) < 1e-7;
                });
                if (dup) continue;
                auto d = describe_orbit(f, rep, q);
                found.push_back(d);
            }
    }
    std::sort(found.begin(), found.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.q != b.q) return a.q < b.q;
        if (a.p.x != b.p.x) return a.p.x < b.p.x;
        return a.p.y < b.p.y;
    });
    return found;
}

}  // namespace sdiss
