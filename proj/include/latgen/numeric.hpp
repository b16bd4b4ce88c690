// include/latgen/numeric.hpp: integer and rational scalars shared by every module.
//
// Integer / Rational are GMP-backed and never overflow. Checked<I> wraps a
// machine integer and throws OverflowError instead of wrapping around; the hot
// loops run on Checked<__int128> and fall back to Integer when it throws.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>

namespace latgen {

using Integer = mpz_class;
using Rational = mpq_class;
using int128 = __int128;

struct OverflowError : std::overflow_error {
    OverflowError() : std::overflow_error("machine integer overflow") {}
};

template <class I>
class Checked {
  public:
    using value_type = I;

    constexpr Checked() noexcept = default;
    constexpr Checked(I v) noexcept : v_(v) {} // NOLINT(implicit)
    template <class J>
        requires(std::is_integral_v<J> && !std::is_same_v<J, I>)
    constexpr Checked(J v) : v_(static_cast<I>(v)) {} // NOLINT(implicit)

    constexpr I value() const noexcept { return v_; }

    friend Checked operator+(Checked a, Checked b) {
        I r;
        if (__builtin_add_overflow(a.v_, b.v_, &r)) throw OverflowError();
        return r;
    }
    friend Checked operator-(Checked a, Checked b) {
        I r;
        if (__builtin_sub_overflow(a.v_, b.v_, &r)) throw OverflowError();
        return r;
    }
    friend Checked operator*(Checked a, Checked b) {
        I r;
        if (__builtin_mul_overflow(a.v_, b.v_, &r)) throw OverflowError();
        return r;
    }
    // Truncating division, like the builtin.
    friend Checked operator/(Checked a, Checked b) {
        if (b.v_ == -1) return -a;
        return a.v_ / b.v_;
    }
    friend Checked operator%(Checked a, Checked b) {
        if (b.v_ == -1) return I{0};
        return a.v_ % b.v_;
    }
    Checked operator-() const {
        if (v_ == std::numeric_limits<I>::min()) throw OverflowError();
        return -v_;
    }
    Checked& operator+=(Checked o) { return *this = *this + o; }
    Checked& operator-=(Checked o) { return *this = *this - o; }
    Checked& operator*=(Checked o) { return *this = *this * o; }

    friend constexpr auto operator<=>(Checked a, Checked b) noexcept = default;
    friend constexpr bool operator==(Checked a, Checked b) noexcept = default;

  private:
    I v_{};
};

using Checked64 = Checked<std::int64_t>;
using Checked128 = Checked<int128>;

// ---------------------------------------------------------------------------
// Generic scalar helpers. Overloaded for Integer and the Checked types so the
// matrix algorithms can be written once as templates.

inline int sign(const Integer& a) { return sgn(a); }
template <class I>
int sign(Checked<I> a) {
    return (a.value() > 0) - (a.value() < 0);
}

inline bool is_zero(const Integer& a) { return sgn(a) == 0; }
inline bool is_zero(const Rational& a) { return sgn(a) == 0; }
template <class I>
bool is_zero(Checked<I> a) {
    return a.value() == 0;
}

inline Integer abs_value(const Integer& a) { return abs(a); }
template <class I>
Checked<I> abs_value(Checked<I> a) {
    return a.value() < 0 ? -a : a;
}

// floor(a / b), b != 0.
inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}
template <class I>
Checked<I> floor_div(Checked<I> a, Checked<I> b) {
    Checked<I> q = a / b;
    if ((a % b).value() != 0 && ((a.value() < 0) != (b.value() < 0))) q = q - Checked<I>(1);
    return q;
}

// Exact division (caller guarantees b | a).
inline Integer exact_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}
template <class I>
Checked<I> exact_div(Checked<I> a, Checked<I> b) {
    return a / b;
}

// Returns (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0.
template <class T>
struct ExtGcd {
    T g, s, t;
};

inline ExtGcd<Integer> ext_gcd(const Integer& a, const Integer& b) {
    ExtGcd<Integer> r;
    mpz_gcdext(r.g.get_mpz_t(), r.s.get_mpz_t(), r.t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}
template <class I>
ExtGcd<Checked<I>> ext_gcd(Checked<I> a, Checked<I> b) {
    I old_r = a.value(), r = b.value();
    I old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const I q = old_r / r;
        I tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) {
        if (old_r == std::numeric_limits<I>::min()) throw OverflowError();
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    return {old_r, old_s, old_t};
}

inline Integer gcd_of(const Integer& a, const Integer& b) { return gcd(a, b); }
template <class I>
Checked<I> gcd_of(Checked<I> a, Checked<I> b) {
    I x = a.value() < 0 ? -a.value() : a.value();
    I y = b.value() < 0 ? -b.value() : b.value();
    while (y != 0) {
        I t = x % y;
        x = y;
        y = t;
    }
    return x;
}

// Conversions between scalar kinds.
template <class T>
T from_integer(const Integer& v);

template <>
inline Integer from_integer<Integer>(const Integer& v) {
    return v;
}
template <>
inline Checked64 from_integer<Checked64>(const Integer& v) {
    if (!v.fits_slong_p()) throw OverflowError();
    return Checked64(static_cast<std::int64_t>(v.get_si()));
}
template <>
inline Checked128 from_integer<Checked128>(const Integer& v) {
    // Two 64-bit halves; bail if the magnitude needs more than 126 bits.
    if (mpz_sizeinbase(v.get_mpz_t(), 2) > 126) throw OverflowError();
    Integer mag = abs(v);
    Integer hi = mag >> 64;
    Integer lo = mag - (hi << 64);
    const auto hi64 = static_cast<unsigned __int128>(mpz_get_ui(hi.get_mpz_t()));
    const auto lo64 = static_cast<unsigned __int128>(mpz_get_ui(lo.get_mpz_t()));
    auto r = static_cast<int128>((hi64 << 64) | lo64);
    return Checked128(sgn(v) < 0 ? -r : r);
}

inline Integer to_integer(const Integer& v) { return v; }
inline Integer to_integer(std::int64_t v) { return Integer(static_cast<long>(v)); }
inline Integer to_integer(int128 v) {
    const bool neg = v < 0;
    auto mag = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    Integer hi(static_cast<unsigned long>(mag >> 64));
    Integer lo(static_cast<unsigned long>(mag & 0xFFFFFFFFFFFFFFFFULL));
    Integer r = (hi << 64) + lo;
    return neg ? Integer(-r) : r;
}
template <class I>
Integer to_integer(Checked<I> v) {
    return to_integer(v.value());
}

// ---------------------------------------------------------------------------
// Parsing and formatting.

inline Integer pow10(int digits) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    return r;
}

// Accepts "123", "-4", "7/3", "-2/6" (reduced on parse) and exact decimals "-1.25".
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    if (const auto dot = s.find('.'); dot != std::string::npos) {
        const std::string frac = s.substr(dot + 1);
        if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos || s.find('/') != std::string::npos)
            throw std::invalid_argument("bad decimal literal: " + s);
        std::string digits = s.substr(0, dot) + frac;
        if (digits == "-" || digits == "+" || digits.empty()) throw std::invalid_argument("bad decimal literal: " + s);
        if (digits[0] == '+') digits.erase(0, 1);
        Integer num;
        if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad decimal literal: " + s);
        Rational q(num, pow10(static_cast<int>(frac.size())));
        q.canonicalize();
        return q;
    }
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

inline Integer parse_integer(std::string_view text) {
    std::string s(text);
    Integer z;
    if (s.empty() || z.set_str(s, 10) != 0) throw std::invalid_argument("bad integer literal: " + s);
    return z;
}

inline std::string to_string(const Integer& z) { return z.get_str(10); }
inline std::string to_string(const Rational& q) { return q.get_str(10); }

// Fixed-point decimal rendering of q, rounded toward -inf at `digits` places.
inline std::string to_decimal(const Rational& q, int digits) {
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    Integer n = q.get_num() * scale;
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), n.get_mpz_t(), q.get_den_mpz_t());
    const bool neg = sgn(f) < 0;
    std::string body = Integer(abs(f)).get_str();
    if (digits > 0) {
        if (static_cast<int>(body.size()) <= digits) body.insert(0, digits + 1 - body.size(), '0');
        body.insert(body.size() - digits, ".");
    }
    return neg ? "-" + body : body;
}

inline Integer pow_int(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational pow_rat(const Rational& base, unsigned long e) {
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    r.canonicalize();
    return r;
}

inline Integer floor_of(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Integer ceil_of(const Rational& q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Integer isqrt(const Integer& a) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), a.get_mpz_t());
    return r;
}

inline bool is_integral(const Rational& q) { return q.get_den() == 1; }

} // namespace latgen
