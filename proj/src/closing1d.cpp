#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "sdiss/closing.hpp"
#include "sdiss/errors.hpp"

namespace sdiss {

namespace {

class Mp {
public:
    explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    Mp(mpfr_prec_t prec, double x) : Mp(prec) { mpfr_set_d(v_, x, MPFR_RNDN); }
    Mp(const Mp& o) : Mp(mpfr_get_prec(o.v_)) { mpfr_set(v_, o.v_, MPFR_RNDN); }
    Mp& operator=(const Mp& o) {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    ~Mp() { mpfr_clear(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    double d() const { return mpfr_get_d(v_, MPFR_RNDN); }

private:
    mpfr_t v_;
};

int cmp(const Mp& a, const Mp& b) { return mpfr_cmp(a.get(), b.get()); }

// x^2 + c at working precision
struct QuadMp {
    double c;
    mpfr_prec_t prec;
    void step(Mp& x) const {
        mpfr_sqr(x.get(), x.get(), MPFR_RNDN);
        mpfr_add_d(x.get(), x.get(), c, MPFR_RNDN);
    }
    void iterate(Mp& x, std::size_t n) const {
        for (std::size_t i = 0; i < n; ++i) step(x);
    }
    // phi(t) = g^q(t) - t and its derivative
    void phi(const Mp& t, std::size_t q, Mp& val, Mp& der) const {
        Mp x(t);
        mpfr_set_ui(der.get(), 1, MPFR_RNDN);
        for (std::size_t i = 0; i < q; ++i) {
            mpfr_mul(der.get(), der.get(), x.get(), MPFR_RNDN);
            mpfr_mul_2ui(der.get(), der.get(), 1, MPFR_RNDN);
            step(x);
        }
        mpfr_sub(val.get(), x.get(), t.get(), MPFR_RNDN);
        mpfr_sub_ui(der.get(), der.get(), 1, MPFR_RNDN);
    }
};

struct Attempt {
    bool need_more = false;  // precision too small for the horizon reached
    mpfr_prec_t need = 0;
    std::optional<Orbit1D> result;
};

Attempt attempt(const QuadraticMap& g, double x0d, double delta, std::size_t max_n, mpfr_prec_t prec, double bits) {
    Attempt at;
    const Interval I = domain(Map1D{g});
    const QuadMp Q{g.c, prec};
    auto budget_ok = [&](std::size_t steps) { return static_cast<double>(steps) * bits + 96.0 <= static_cast<double>(prec); };
    auto escaped = [&](const Mp& x) {
        double v = x.d();
        return !(v >= I.lo && v <= I.hi);
    };

    const Mp x0(prec, x0d);
    Mp x(x0), diff(prec);
    std::size_t n = 0;
    for (std::size_t i = 1; i <= max_n; ++i) {
        if (!budget_ok(i)) {
            at.need_more = true;
            at.need = static_cast<mpfr_prec_t>(2.0 * static_cast<double>(i) * bits + 160.0);
            return at;
        }
        Q.step(x);
        if (escaped(x)) return at;
        mpfr_sub(diff.get(), x.get(), x0.get(), MPFR_RNDN);
        if (std::abs(diff.d()) < delta) {
            n = i;
            break;
        }
    }
    if (n == 0) return at;
    Orbit1D r;
    r.x0 = x0d;
    r.x1 = x.d();
    r.n = n;
    if (mpfr_zero_p(diff.get())) {
        r.degenerate = true;
        r.k = 1;
        r.period = n;
        r.p = x0d;
        r.root = std::to_string(x0d);
        r.precision_bits = static_cast<long>(prec);
        at.result = r;
        return at;
    }
    const Mp x1(x);
    const bool up = cmp(x0, x1) < 0;  // x0 < x1
    // first k with g^{nk}(x1) past x1 (below it when x0 < x1)
    std::size_t k = 0;
    Mp z(x1);
    for (std::size_t kk = 1; n * (kk + 1) <= max_n; ++kk) {
        if (!budget_ok(n * (kk + 1))) {
            at.need_more = true;
            at.need = static_cast<mpfr_prec_t>(2.0 * static_cast<double>(n * (kk + 1)) * bits + 160.0);
            return at;
        }
        Q.iterate(z, n);
        if (escaped(z)) return at;
        int c = cmp(z, x1);
        if ((up && c < 0) || (!up && c > 0)) {
            k = kk;
            break;
        }
    }
    if (k == 0) return at;
    const std::size_t q = n * k;

    // phi = g^q - id: phi(x0) = g^{n(k-1)}(x1) - x0 has the sign opposite to phi(x1)
    Mp lo(up ? x0 : x1), hi(up ? x1 : x0), val(prec), der(prec);
    Q.phi(lo, q, val, der);
    const int s_lo = mpfr_sgn(val.get());
    Q.phi(hi, q, val, der);
    const int s_hi = mpfr_sgn(val.get());
    if (s_lo == 0 || s_hi == 0 || s_lo == s_hi)
        throw NumericalError("interval_periodic_near: no sign change of g^q - id on the bracket");

    // Newton inside the bracket while it keeps halving |phi|, bisection otherwise
    Mp t(prec), cand(prec), step(prec);
    mpfr_add(t.get(), lo.get(), hi.get(), MPFR_RNDN);
    mpfr_div_2ui(t.get(), t.get(), 1, MPFR_RNDN);
    const double target = 1e-24;
    const std::size_t max_iter = 4 * q + 400;
    bool done = false;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < max_iter; ++it) {
        Q.phi(t, q, val, der);
        const double a = std::abs(val.d());
        if (a < target) {
            done = true;
            break;
        }
        if (mpfr_sgn(val.get()) == s_lo)
            lo = t;
        else
            hi = t;
        bool newton = false;
        if (a < 0.5 * prev && !mpfr_zero_p(der.get())) {
            mpfr_div(step.get(), val.get(), der.get(), MPFR_RNDN);
            mpfr_sub(cand.get(), t.get(), step.get(), MPFR_RNDN);
            newton = cmp(cand, lo) > 0 && cmp(cand, hi) < 0;
        }
        prev = a;
        if (newton) {
            t = cand;
        } else {
            mpfr_add(t.get(), lo.get(), hi.get(), MPFR_RNDN);
            mpfr_div_2ui(t.get(), t.get(), 1, MPFR_RNDN);
            prev = std::numeric_limits<double>::infinity();
        }
    }
    if (!done) throw NumericalError("interval_periodic_near: root refinement did not converge");

    // minimal period with the usual 1e-6 divisor tolerance
    std::size_t period = q;
    for (std::size_t d = 1; d < q; ++d) {
        if (q % d) continue;
        Mp y(t);
        Q.iterate(y, d);
        mpfr_sub(diff.get(), y.get(), t.get(), MPFR_RNDN);
        if (std::abs(diff.d()) < 1e-6) {
            period = d;
            break;
        }
    }
    r.k = k;
    r.period = period;
    r.p = t.d();
    r.residual = std::abs(val.d());
    r.precision_bits = static_cast<long>(prec);
    {
        mpfr_exp_t e;
        const std::size_t digits = static_cast<std::size_t>(static_cast<double>(prec) * 0.30103) + 2;
        std::unique_ptr<char, void (*)(char*)> s(mpfr_get_str(nullptr, &e, 10, digits, t.get(), MPFR_RNDN),
                                                 [](char* p) { mpfr_free_str(p); });
        std::string m(s.get());
        std::string sign;
        if (!m.empty() && m[0] == '-') {
            sign = "-";
            m.erase(0, 1);
        }
        r.root = sign + "0." + m + "e" + std::to_string(e);
    }
    at.result = r;
    return at;
}

}  // namespace

std::optional<Orbit1D> interval_periodic_near(const Map1D& g, double x0, double delta, std::size_t max_n) {
    const auto* quad = std::get_if<QuadraticMap>(&g);
    if (!quad) throw ParameterError("interval_periodic_near: only the quadratic interval family is supported");
    if (!(delta > 0)) throw ParameterError("interval_periodic_near: delta must be positive");
    const Interval I = domain(g);
    if (!(x0 >= I.lo && x0 <= I.hi)) return std::nullopt;
    // forward error grows at most by sup|g'| per step
    const double L = std::max(2.0 * std::max(std::abs(I.lo), std::abs(I.hi)), 2.0);
    const double bits = std::log2(L);
    mpfr_prec_t prec = 512;
    for (int round = 0; round < 40; ++round) {
        auto at = attempt(*quad, x0, delta, max_n, prec, bits);
        if (!at.need_more) return at.result;
        prec = std::max(at.need, 2 * prec);
    }
    throw NumericalError("interval_periodic_near: precision escalation did not settle");
}

}  // namespace sdiss
