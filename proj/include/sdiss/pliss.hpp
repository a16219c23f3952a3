#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sdiss/ergodic.hpp"
#include "sdiss/maps.hpp"

namespace sdiss {

struct PlissParams {
    double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
};

struct PlissResult {
    std::vector<std::size_t> indices;  // 0-based, increasing
    double density = 0.0;              // k / (n_k + 1) at the last index
};

// Argmax chain on the partial sums of (a_i - alpha3): n_1 is the smallest
// maximizer over [0, L], n_{k+1} the smallest maximizer over (n_k, L]; the
// terminal index L is dropped. Every returned j then satisfies
// (a_j + ... + a_{n-1}) / (n - j) <= alpha3 for all j < n <= L.
PlissResult pliss_times(std::span<const double> seq, const PlissParams& p);

// Exact small rationals for the density arithmetic.
struct Rational {
    std::int64_t num = 0, den = 1;
    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);
    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend bool operator<(Rational a, Rational b);
    friend bool operator==(Rational a, Rational b) = default;
};
// 9/14 + 9/17 - 1
Rational p1_density_bound();

struct CertificateConstants {
    double sigma = 0.0, sigma_tilde = 0.0, rho = 0.0, rho_tilde = 0.0;
    bool ordered() const;  // 0 < sigma_tilde <= sigma < 1, 0 < rho_tilde <= rho < 1
    double pinching() const { return sigma_tilde * rho_tilde / (sigma * rho); }
    bool pinched() const { return pinching() > sigma; }
};

struct P1Constants {
    double D = 0.0, m = 0.0;
    double sigma_tilde = 0.0, rho_tilde = 0.0, sigma = 0.0, rho = 0.0;
    bool valid = false;  // D < m^{9/10}
    CertificateConstants constants() const { return {sigma, sigma_tilde, rho, rho_tilde}; }
};

P1Constants p1_constants(double D, double m);
// m^3 D^{-51/20} > D^{47/60} > D^{4/5}, evaluated in long double.
bool p1_chain_holds(const P1Constants& c);
// sigma, sigma_tilde = exp(l- +- eps); rho, rho_tilde = exp(l- - l+ +- eps).
CertificateConstants lyapunov_constants(double lambda_minus, double lambda_plus, double eps);

// sup |det Df| and inf co-norm over grid points of a region's bounding box
// that lie inside the region.
struct JacobianExtrema {
    double D = 0.0;     // sup |det Df|
    double m = 0.0;     // inf of the smallest singular value
    double norm = 0.0;  // sup of the largest singular value
};
JacobianExtrema jacobian_extrema(const PlanarMap& f, const TrappingRegion& S, int grid_n);

struct DirectionEstimate {
    Point2 E;
    bool degenerate = false;
};

// Most contracted right-singular direction of Df^{n_back} at orbit point `start`.
DirectionEstimate estimate_E(const PlanarMap& f, const OrbitSegment& orbit, std::size_t n_back, std::size_t start = 0);

// Per-step data along an orbit, with independently estimated directions
// e_n oriented consistently with Df e_{n-1}.
struct TangentData {
    std::vector<Point2> points;      // x_0 .. x_{count}
    std::vector<Point2> dirs;        // e_0 .. e_{count}
    std::vector<double> log_stretch; // log |Df(x_j) e_j|, j < count
    std::vector<double> log_det;     // log |det Df(x_j)|, j < count
    std::vector<double> det_sign;    // sign det Df(x_j)
    std::size_t degenerate_steps = 0;

    std::size_t count() const { return log_stretch.size(); }
};

// Needs orbit.length() >= count + n_back.
TangentData tangent_data(const PlanarMap& f, const OrbitSegment& orbit, std::size_t count, std::size_t n_back);
// Pushes a prescribed direction E forward instead of estimating it.
TangentData tangent_data_along(const PlanarMap& f, const OrbitSegment& orbit, Point2 E, std::size_t count);

struct HyperbolicityCertificate {
    Point2 x;
    Point2 E;
    CertificateConstants c;
    std::size_t N = 0;
    bool pass_stretch = false;  // sigma_tilde^n <= m_n <= sigma^n
    bool pass_pinch = false;    // rho_tilde^n <= m_n^2/|det_n| <= rho^n
    bool pass = false;
    std::optional<std::size_t> first_fail_n;
};

HyperbolicityCertificate certify(const TangentData& td, const CertificateConstants& c, std::size_t N);
// Convenience: orbit from p, estimated directions, window N.
HyperbolicityCertificate certify_point(const PlanarMap& f, Point2 p, const CertificateConstants& c, std::size_t N,
                                       std::size_t n_back);

double block_fraction(const EmpiricalMeasure& mu, const PlanarMap& f, const CertificateConstants& c, std::size_t N,
                      std::size_t n_back, unsigned threads = 1);

struct CriticalReport {
    double fraction = 0.0;       // share of samples with |h'(x)| <= delta
    double choice_lhs = 0.0;     // 2 log K / (2 log K + |log delta| / 2)
    double K = 0.0;              // > max(sup|h'|, sup ||Df_b||)
    bool choice_ok = false;      // choice_lhs < 1/15
    double lambda_plus = 0.0;    // largest exponent along the sample orbit
    bool nonnegative_exponent = false;
};
CriticalReport critical_fraction(const Extension2D& f, double delta, const EmpiricalMeasure& mu);

struct SlopeReport {
    double min_slope = 0.0;
    bool vertical = false;  // some E had zero x-component
};
inline constexpr double vertical_slope_sentinel = 1e300;
struct PointDirection {
    Point2 p;
    Point2 E;
};
std::optional<SlopeReport> min_slope(const std::vector<PointDirection>& pts);

}  // namespace sdiss
