#pragma once

#include <string>
#include <variant>

#include "sdiss/geometry.hpp"

namespace sdiss {

// H_{a,b}(x, y) = (1 - a x^2 + y, -b x); det DH = b.
struct HenonMap {
    double a = 1.4;
    double b = 0.1;
};

// h(x) = x^2 + c on I = (c/2 - 1, -c/2 + 1).
struct QuadraticMap {
    double c = -1.5;
};

// Lift of the Arnold circle map: h(x) = x + a sin(2 pi x) + omega, h(x+1) = h(x) + 1.
struct ArnoldMap {
    double a = 0.1;
    double omega = 0.3;
};

using Map1D = std::variant<QuadraticMap, ArnoldMap>;

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

double eval(const Map1D& h, double x);
double deriv(const Map1D& h, double x);
double second_deriv_bound(const Map1D& h);
bool is_circle(const Map1D& h);
// Interval of definition; for circle maps one fundamental domain [0, 1].
Interval domain(const Map1D& h);
// Exact h(x + d) - h(x), free of cancellation for small d.
double increment(const Map1D& h, double x, double d);

// f_b(x, y) = (h(x) + y, b (h(x) - x + y)) on S = I x (-eps, eps); det Df_b = b.
struct Extension2D {
    Map1D h = QuadraticMap{};
    double b = 0.01;
    double eps = 0.05;
};

// p -> A p + t; used for toy saddles and sinks.
struct AffineMap {
    Mat2 A = Mat2::identity();
    Point2 t{};
};

using PlanarMap = std::variant<HenonMap, Extension2D, AffineMap>;

std::string describe(const PlanarMap& f);

// Unchecked formulas (valid on all of R^2), used on hot paths.
Point2 apply(const PlanarMap& f, Point2 p);
Mat2 jacobian(const PlanarMap& f, Point2 p);
bool invertible(const PlanarMap& f);
// Throws NotInvertibleError when the map is not invertible.
Point2 apply_inverse(const PlanarMap& f, Point2 p);
// f(base + d) - f(base) evaluated without catastrophic cancellation.
Point2 displacement(const PlanarMap& f, Point2 base, Point2 d);
// Hoelder data (C_f, alpha) of Df: ||Df(p) - Df(q)|| <= C_f |p - q|^alpha.
struct HolderData {
    double C_f = 0.0;
    double alpha = 1.0;
};
HolderData holder_data(const PlanarMap& f);
Point2 iterate_point(const PlanarMap& f, Point2 p, std::size_t n);

// Checked evaluations: non-finite input / outside domain -> DomainError.
Point2 henon_eval(const HenonMap& m, Point2 p);
Point2 henon_inverse(const HenonMap& m, Point2 p);
Point2 extension_eval(const Extension2D& f, Point2 p);

struct ConjugacyGrid {
    int n = 101;              // points per axis
    double half_width = 1.0;  // sampled square [-w, w]^2 in Henon coordinates
};

// Max over the grid of || psi(H_{a,b}(q)) - f_b(psi(q)) || with
// psi(X, Y) = (-a X - b/2, -a Y - a b X) and a = -b^2/4 - c - b/2.
double conjugacy_check(double c, double b, const ConjugacyGrid& grid = {});
double conjugate_henon_a(double c, double b);

}  // namespace sdiss
