#pragma once

#include <cstddef>
#include <vector>

#include "sdiss/ergodic.hpp"
#include "sdiss/geometry.hpp"
#include "sdiss/maps.hpp"
#include "sdiss/pliss.hpp"
#include "sdiss/trapping.hpp"

namespace sdiss {

struct ChartRates {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

// lambda2 = theta * rho_tilde, lambda1 the log-midpoint of sigma and
// min(1, sqrt(sigma_tilde lambda2 / rho)). ParameterError if not pinched.
ChartRates choose_rates(const CertificateConstants& c);
// Throws ParameterError unless lambda1 in (sigma, 1), lambda2 in (0, rho_tilde)
// and sigma_tilde lambda2 / (lambda1 rho) > lambda1.
void check_rates(const CertificateConstants& c, ChartRates r);

// Per-index data along a certified window, n = 0..N (A, B, m, M up to N+1).
struct ChartSequence {
    std::size_t N = 0;
    std::size_t T = 0;  // absolute truncation index of every A_n series
    std::vector<double> log_m, log_M;
    std::vector<double> A, B;
    std::vector<double> a, c, d;  // entries of H_n
    std::vector<double> r;        // chart radii
    std::vector<Point2> points, dirs;
    double lambda1 = 0.0, lambda2 = 0.0, C0 = 0.0;
    double C_f = 0.0, alpha = 1.0, eps_chart = 1e-3;
    CertificateConstants constants;

    double m(std::size_t n) const;
    double M(std::size_t n) const;
};

// td must cover the truncation index: td.count() >= T. The certificate is
// re-checked on [0, T]; any failure is a ParameterError.
ChartSequence chart_sequence(const PlanarMap& f, const TangentData& td, const CertificateConstants& c, ChartRates rates,
                             std::size_t N, double eps_chart = 1e-3);
// Convenience: directions estimated along `orbit` with n_back backward steps.
ChartSequence chart_sequence(const PlanarMap& f, const OrbitSegment& orbit, const CertificateConstants& c,
                             ChartRates rates, std::size_t N, std::size_t n_back, double eps_chart = 1e-3);

struct ChartCheck {
    double recursion_A = 0.0;  // worst relative residual
    double recursion_B = 0.0;
    bool uniform_A = true;     // A_n <= C0 lambda1^n sigma_tilde^-n
    bool uniform_B = true;     // B_n <= (rho/lambda2)^n C0
    bool bound_a = true;       // |a| < lambda1
    bool bound_c = true;       // |c| > |a| / lambda2
    bool ok(double tol = 1e-9) const {
        return recursion_A <= tol && recursion_B <= tol && uniform_A && uniform_B && bound_a && bound_c;
    }
};
ChartCheck check_chart(const ChartSequence& cs);

struct CurveOptions {
    double eta = 0.1;       // cone opening
    double r0_max = 0.05;   // cap on the starting radius
    double r0_min = 1e-12;
    int nodes = 33;         // Chebyshev nodes per graph
    int samples = 201;      // polyline samples of the output
};

struct StableCurve {
    Point2 x;
    Point2 E;            // tangent of the curve at x
    Polyline points;     // from the negative end to the positive end
    std::vector<double> s;
    double r0 = 0.0;     // half-width along e_0
    double C = 0.0, lambda = 0.0;
    std::vector<double> forward_lengths;  // length of f^n(curve), n = 0..N
    std::vector<Point2> ends_plus, ends_minus;  // f^n of the two endpoints
    int halvings = 0;
};

StableCurve local_stable_curve(const PlanarMap& f, const ChartSequence& cs, const CurveOptions& opt = {});

// Graphs v = phi_n(u) over [-rho_n, rho_n] in the frame (e_n, perp e_n) at
// x_n for n = start..start+window, obtained by pulling phi == 0 back from the
// end of the window. rho_n = r0 (1 + (n - start) / (2 window)) m_n / m_start.
class ChebGraph {
public:
    ChebGraph() = default;
    ChebGraph(double half, std::vector<double> values_at_nodes);
    double half() const { return half_; }
    double operator()(double u) const;
    double deriv(double u) const;
    static std::vector<double> nodes(int n, double half);
    double length(double u0, double u1) const;

private:
    double half_ = 0.0;
    std::vector<double> c_, dc_;
};

// Orbit frames consumed by the graph transform; log_m[n] = sum_{j<n} log_stretch[j].
struct Frames {
    const std::vector<Point2>& points;
    const std::vector<Point2>& dirs;
    const std::vector<double>& log_m;
};
std::vector<double> cumulative_log_m(const TangentData& td);

// Empty on failure (slope outside the cone, domain overflow, Newton failure).
std::vector<ChebGraph> graph_transform(const PlanarMap& f, const Frames& fr, std::size_t start, std::size_t window,
                                       double r0, int nodes, double eta);

struct GrowOptions {
    double r0 = 1e-3;
    std::size_t window = 30;
    std::size_t max_pullbacks = 40;
    double h_max = 0.01;
    double max_turn = 0.05;
    std::size_t max_points = 20000;
    int nodes = 33;
    double eta = 0.1;
};

struct StableBranchPair {
    Point2 x;
    Polyline plus, minus;  // both start at x
    bool exit_plus = false, exit_minus = false;
    std::size_t pullbacks = 0;
    double length_plus() const { return polyline_length(plus); }
    double length_minus() const { return polyline_length(minus); }
};

// Needs td.count() >= max_pullbacks + window.
StableBranchPair grow_branches(const PlanarMap& f, const TangentData& td, const TrappingRegion& S,
                               const GrowOptions& opt = {});

// p in f(S) iff f^{-1}(p) in S.
bool f_of_S_membership(const PlanarMap& f, const TrappingRegion& S, Point2 p);

}  // namespace sdiss
