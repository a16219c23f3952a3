#include "sdiss/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sdiss/errors.hpp"

namespace sdiss {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
}  // namespace

double eval(const Map1D& h, double x) {
    return std::visit(overloaded{[x](const QuadraticMap& q) { return x * x + q.c; },
                                 [x](const ArnoldMap& m) { return x + m.a * std::sin(two_pi * x) + m.omega; }},
                      h);
}

double deriv(const Map1D& h, double x) {
    return std::visit(overloaded{[x](const QuadraticMap&) { return 2.0 * x; },
                                 [x](const ArnoldMap& m) { return 1.0 + two_pi * m.a * std::cos(two_pi * x); }},
                      h);
}

double second_deriv_bound(const Map1D& h) {
    return std::visit(overloaded{[](const QuadraticMap&) { return 2.0; },
                                 [](const ArnoldMap& m) { return two_pi * two_pi * std::abs(m.a); }},
                      h);
}

bool is_circle(const Map1D& h) { return std::holds_alternative<ArnoldMap>(h); }

Interval domain(const Map1D& h) {
    return std::visit(overloaded{[](const QuadraticMap& q) { return Interval{q.c / 2 - 1, -q.c / 2 + 1}; },
                                 [](const ArnoldMap&) { return Interval{0.0, 1.0}; }},
                      h);
}

double increment(const Map1D& h, double x, double d) {
    return std::visit(
        overloaded{[=](const QuadraticMap&) { return d * (2.0 * x + d); },
                   [=](const ArnoldMap& m) {
                       return d + 2.0 * m.a * std::cos(two_pi * x + std::numbers::pi * d) * std::sin(std::numbers::pi * d);
                   }},
        h);
}

std::string describe(const PlanarMap& f) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{[&](const HenonMap& m) { os << "henon(a=" << m.a << ",b=" << m.b << ")"; },
                          [&](const Extension2D& e) {
                              if (auto q = std::get_if<QuadraticMap>(&e.h))
                                  os << "extension-quadratic(c=" << q->c;
                              else {
                                  auto& m = std::get<ArnoldMap>(e.h);
                                  os << "extension-arnold(a=" << m.a << ",omega=" << m.omega;
                              }
                              os << ",b=" << e.b << ",eps=" << e.eps << ")";
                          },
                          [&](const AffineMap& m) {
                              os << "affine(" << m.A.a11 << "," << m.A.a12 << "," << m.A.a21 << "," << m.A.a22 << ";"
                                 << m.t.x << "," << m.t.y << ")";
                          }},
               f);
    return os.str();
}

Point2 apply(const PlanarMap& f, Point2 p) {
    return std::visit(overloaded{[p](const HenonMap& m) { return Point2{1.0 - m.a * p.x * p.x + p.y, -m.b * p.x}; },
                                 [p](const Extension2D& e) {
                                     double hx = eval(e.h, p.x);
                                     return Point2{hx + p.y, e.b * (hx - p.x + p.y)};
                                 },
                                 [p](const AffineMap& m) { return m.A * p + m.t; }},
                      f);
}

Mat2 jacobian(const PlanarMap& f, Point2 p) {
    return std::visit(overloaded{[p](const HenonMap& m) { return Mat2{-2.0 * m.a * p.x, 1.0, -m.b, 0.0}; },
                                 [p](const Extension2D& e) {
                                     double d = deriv(e.h, p.x);
                                     return Mat2{d, 1.0, e.b * (d - 1.0), e.b};
                                 },
                                 [](const AffineMap& m) { return m.A; }},
                      f);
}

bool invertible(const PlanarMap& f) {
    return std::visit(overloaded{[](const HenonMap& m) { return m.b != 0.0; },
                                 [](const Extension2D& e) { return e.b != 0.0; },
                                 [](const AffineMap& m) { return m.A.det() != 0.0; }},
                      f);
}

Point2 apply_inverse(const PlanarMap& f, Point2 p) {
    if (!invertible(f)) throw NotInvertibleError("map is not invertible: " + describe(f));
    return std::visit(overloaded{[p](const HenonMap& m) {
                                     double x = -p.y / m.b;
                                     return Point2{x, p.x - 1.0 + m.a * x * x};
                                 },
                                 [p](const Extension2D& e) {
                                     double x = p.x - p.y / e.b;
                                     return Point2{x, p.x - eval(e.h, x)};
                                 },
                                 [p](const AffineMap& m) { return m.A.inverse() * (p - m.t); }},
                      f);
}

Point2 displacement(const PlanarMap& f, Point2 base, Point2 d) {
    return std::visit(overloaded{[&](const HenonMap& m) {
                                     return Point2{-m.a * d.x * (2.0 * base.x + d.x) + d.y, -m.b * d.x};
                                 },
                                 [&](const Extension2D& e) {
                                     double dh = increment(e.h, base.x, d.x);
                                     return Point2{dh + d.y, e.b * (dh - d.x + d.y)};
                                 },
                                 [&](const AffineMap& m) { return m.A * d; }},
                      f);
}

HolderData holder_data(const PlanarMap& f) {
    return std::visit(overloaded{[](const HenonMap& m) { return HolderData{2.0 * std::abs(m.a), 1.0}; },
                                 [](const Extension2D& e) {
                                     return HolderData{second_deriv_bound(e.h) * std::sqrt(1.0 + e.b * e.b), 1.0};
                                 },
                                 [](const AffineMap&) { return HolderData{0.0, 1.0}; }},
                      f);
}

Point2 iterate_point(const PlanarMap& f, Point2 p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) p = apply(f, p);
    return p;
}

Point2 henon_eval(const HenonMap& m, Point2 p) {
    if (!is_finite(p)) throw DomainError("henon_eval: non-finite point");
    return apply(m, p);
}

Point2 henon_inverse(const HenonMap& m, Point2 p) {
    if (!is_finite(p)) throw DomainError("henon_inverse: non-finite point");
    if (m.b == 0.0) throw NotInvertibleError("henon_inverse: b = 0");
    return apply_inverse(m, p);
}

Point2 extension_eval(const Extension2D& f, Point2 p) {
    if (!is_finite(p)) throw DomainError("extension_eval: non-finite point");
    if (!is_circle(f.h) && !domain(f.h).contains(p.x)) throw DomainError("extension_eval: x outside the interval of h");
    if (!(std::abs(p.y) < f.eps)) throw DomainError("extension_eval: |y| >= eps");
    return apply(f, p);
}

double conjugate_henon_a(double c, double b) { return -b * b / 4.0 - c - b / 2.0; }

double conjugacy_check(double c, double b, const ConjugacyGrid& grid) {
    double a = conjugate_henon_a(c, b);
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("conjugacy_check: a = -b^2/4 - c - b/2 must be positive");
    if (grid.n < 2) throw ParameterError("conjugacy_check: grid needs at least 2 points per axis");
    HenonMap H{a, b};
    Extension2D F{QuadraticMap{c}, b, 1.0};
    auto psi = [a, b](Point2 q) { return Point2{-a * q.x - b / 2.0, -a * q.y - a * b * q.x}; };
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            Point2 q{-grid.half_width + 2.0 * grid.half_width * i / (grid.n - 1),
                     -grid.half_width + 2.0 * grid.half_width * j / (grid.n - 1)};
            Point2 lhs = psi(apply(H, q));
            Point2 rhs = apply(F, psi(q));
            worst = std::max(worst, dist(lhs, rhs));
        }
    }
    return worst;
}

}  // namespace sdiss
