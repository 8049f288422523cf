#ifndef QUOTER_DETAIL_DDOUBLE_HPP
#define QUOTER_DETAIL_DDOUBLE_HPP

// Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
// Used by the verification oracle and test oracles whose residual gates sit
// below what a single double evaluation can resolve. Roughly 31 significant
// decimal digits; enough for every check here.

#include <cmath>

namespace quoter::detail {

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    dd() = default;
    dd(double h) : hi(h), lo(0.0) {}
    dd(double h, double l) : hi(h), lo(l) {}
};

// s + err == a + b exactly, |err| <= ulp(s)/2, assuming |a| >= |b|.
inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return dd(s, b - (s - a));
}

// s + err == a + b exactly, no magnitude assumption (Knuth).
inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return dd(s, err);
}

// p + err == a * b exactly.
inline dd two_prod(double a, double b) {
    double p = a * b;
    return dd(p, std::fma(a, b, -p));
}

inline dd dd_add(const dd& a, const dd& b) {
    dd s = two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    return quick_two_sum(s.hi, lo);
}

inline dd dd_add(const dd& a, double b) { return dd_add(a, dd(b)); }

inline dd dd_neg(const dd& a) { return dd(-a.hi, -a.lo); }

inline dd dd_sub(const dd& a, const dd& b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(const dd& a, const dd& b) {
    dd p = two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, lo);
}

inline dd dd_mul(const dd& a, double b) { return dd_mul(a, dd(b)); }

inline dd dd_mul(double a, double b) { return two_prod(a, b); }

inline dd dd_div(const dd& a, const dd& b) {
    double q1 = a.hi / b.hi;
    dd r = dd_sub(a, dd_mul(b, q1));
    double q2 = r.hi / b.hi;
    r = dd_sub(r, dd_mul(b, q2));
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return dd_add(q, q3);
}

inline dd dd_sq(const dd& a) { return dd_mul(a, a); }

inline double to_double(const dd& a) { return a.hi + a.lo; }

inline bool dd_lt(const dd& a, const dd& b) {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}

inline dd dd_abs(const dd& a) { return a.hi < 0.0 ? dd_neg(a) : a; }

// exp(a) by argument reduction a = k*ln2 + r, |r| <= ln2/2, then the Taylor
// series on r (the tail after 30 terms is < 1e-40 for |r| <= 0.35).
inline dd dd_exp(const dd& a) {
    static const dd kLn2(0.69314718055994529, 9.4172321214581765e-18);
    if (a.hi > 709.0) return dd(HUGE_VAL);
    if (a.hi < -709.0) return dd(0.0);
    double k = std::nearbyint(a.hi / kLn2.hi);
    dd r = dd_sub(a, dd_mul(kLn2, k));
    dd sum(1.0);
    dd term(1.0);
    for (int n = 1; n <= 30; ++n) {
        term = dd_mul(term, r);
        term = dd_div(term, dd(static_cast<double>(n)));
        sum = dd_add(sum, term);
        if (std::fabs(term.hi) < 1e-40 * std::fabs(sum.hi)) break;
    }
    int ik = static_cast<int>(k);
    return dd(std::ldexp(sum.hi, ik), std::ldexp(sum.lo, ik));
}

// log(a) as one Newton correction of the double-precision seed:
// y = y0 + (a*exp(-y0) - 1), accurate to ~eps^2.
inline dd dd_log(const dd& a) {
    double y0 = std::log(a.hi);
    dd e = dd_exp(dd(-y0));
    dd corr = dd_sub(dd_mul(a, e), dd(1.0));
    return dd_add(dd(y0), corr);
}

// expm1 for small |a|: exp(a) - 1 without the cancellation.
inline dd dd_expm1(const dd& a) {
    if (std::fabs(a.hi) > 0.5) return dd_sub(dd_exp(a), dd(1.0));
    dd sum = a;
    dd term = a;
    for (int n = 2; n <= 30; ++n) {
        term = dd_mul(term, a);
        term = dd_div(term, dd(static_cast<double>(n)));
        sum = dd_add(sum, term);
        if (std::fabs(term.hi) < 1e-40 * std::fabs(sum.hi)) break;
    }
    return sum;
}

}  // namespace quoter::detail

#endif  // QUOTER_DETAIL_DDOUBLE_HPP
