// include/latgen/interval.hpp: certified enclosures with rational endpoints.
//
// Every operation returns an interval that contains the exact result for any
// choice of operands inside the inputs. round_out() widens the endpoints onto
// the grid 10^-digits so denominators stay bounded during long products.

#pragma once

#include "latgen/numeric.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace latgen {

class Interval {
  public:
    Interval() = default;
    Interval(const Rational& exact) : lo_(exact), hi_(exact) {} // NOLINT(implicit)
    Interval(const Rational& lo, const Rational& hi) : lo_(lo), hi_(hi) {
        if (hi_ < lo_) throw std::invalid_argument("interval: lo > hi");
    }
    static Interval from_int(long v) { return Interval(Rational(v)); }

    const Rational& lo() const noexcept { return lo_; }
    const Rational& hi() const noexcept { return hi_; }
    Rational width() const { return hi_ - lo_; }
    Rational mid() const { return (lo_ + hi_) / 2; }

    bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool positive() const { return sgn(lo_) > 0; }

    // Outward rounding onto multiples of 10^-digits.
    Interval round_out(int digits) const {
        const Integer s = pow10(digits);
        Rational lo(floor_of(lo_ * s), s), hi(ceil_of(hi_ * s), s);
        lo.canonicalize();
        hi.canonicalize();
        return Interval(lo, hi);
    }

    friend Interval operator+(const Interval& a, const Interval& b) { return {a.lo_ + b.lo_, a.hi_ + b.hi_}; }
    friend Interval operator-(const Interval& a, const Interval& b) { return {a.lo_ - b.hi_, a.hi_ - b.lo_}; }
    Interval operator-() const { return {-hi_, -lo_}; }
    friend Interval operator*(const Interval& a, const Interval& b) {
        const Rational p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
        return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (sgn(b.lo_) <= 0 && sgn(b.hi_) >= 0) throw std::domain_error("interval division by an interval containing 0");
        return a * Interval(1 / b.hi_, 1 / b.lo_);
    }

    Interval pow(unsigned e) const {
        Interval r(Rational(1));
        for (unsigned i = 0; i < e; ++i) r = r * *this;
        return r;
    }

  private:
    Rational lo_{0};
    Rational hi_{0};
};

// [lo, hi] with lo^2 <= q <= hi^2, width <= 10^-digits. q >= 0.
inline Interval sqrt_enclosure(const Rational& q, int digits) {
    if (sgn(q) < 0) throw std::domain_error("sqrt of a negative rational");
    const Integer s = pow10(digits);
    const Rational scaled = q * s * s;
    const Integer lo_int = isqrt(floor_of(scaled));
    Integer hi_int = isqrt(ceil_of(scaled));
    if (Rational(hi_int * hi_int) < scaled) hi_int += 1;
    Rational lo(lo_int, s), hi(hi_int, s);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

inline Interval sqrt_enclosure(const Interval& x, int digits) {
    return {sqrt_enclosure(x.lo(), digits).lo(), sqrt_enclosure(x.hi(), digits).hi()};
}

namespace detail {

// 2·atanh(y) = log((1+y)/(1-y)) for 0 <= y <= 1/3, tail bounded geometrically.
inline Interval two_atanh(const Rational& y, int digits) {
    const Rational y2 = y * y;
    const Rational target(1, pow10(digits + 2));
    Rational term = y, sum = 0;
    unsigned long k = 0;
    for (;;) {
        sum += term / (2 * k + 1);
        term *= y2;
        ++k;
        // Remaining terms: sum_{i>=k} y^{2i+1}/(2i+1) <= term / ((2k+1)(1-y^2)).
        const Rational tail = term / ((2 * k + 1) * (1 - y2));
        if (tail < target) return Interval(2 * sum, 2 * (sum + tail)).round_out(digits + 2);
    }
}

} // namespace detail

// Natural logarithm of x > 0, width about 10^-digits.
inline Interval log_enclosure(const Rational& x, int digits) {
    if (sgn(x) <= 0) throw std::domain_error("log of a nonpositive rational");
    // x = m·2^e with m in [1, 2).
    long e = 0;
    Rational m = x;
    while (m >= 2) {
        m /= 2;
        ++e;
    }
    while (m < 1) {
        m *= 2;
        --e;
    }
    const Interval log2 = detail::two_atanh(Rational(1, 3), digits + 4);
    const Interval logm = detail::two_atanh((m - 1) / (m + 1), digits + 4);
    return (logm + Interval::from_int(e) * log2).round_out(digits);
}

inline std::string format_interval(const Interval& iv, int digits) {
    return "[" + to_decimal(iv.lo(), digits) + ", " + to_decimal(iv.hi(), digits) + "]";
}

} // namespace latgen
