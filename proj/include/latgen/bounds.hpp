// include/latgen/bounds.hpp: closed-form probability bounds as certified enclosures.

#pragma once

#include "latgen/interval.hpp"
#include "latgen/numeric.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace latgen {

inline constexpr int kDefaultPrecision = 30;

namespace detail {

// B_0 .. B_{count-1} via the standard recurrence sum_{k<=m} C(m+1,k) B_k = 0.
inline std::vector<Rational> bernoulli_numbers(std::size_t count) {
    std::vector<Rational> b(count);
    if (count == 0) return b;
    b[0] = 1;
    for (std::size_t m = 1; m < count; ++m) {
        Rational acc = 0;
        Integer binom = 1; // C(m+1, k)
        for (std::size_t k = 0; k < m; ++k) {
            acc += binom * b[k];
            binom = binom * static_cast<unsigned long>(m + 1 - k) / static_cast<unsigned long>(k + 1);
        }
        b[m] = -acc / static_cast<unsigned long>(m + 1);
    }
    return b;
}

inline Interval rounded(const Rational& q, int digits) { return Interval(q).round_out(digits); }

// n^{e/2} for integers n >= 1, e >= 0: exact when n^e is a square of an integer
// power (e even), otherwise a square-root enclosure of n^e.
inline Interval half_power(unsigned long n, unsigned long e, int digits) {
    const Integer p = pow_int(Integer(n), e);
    if (e % 2 == 0) return Interval(Rational(pow_int(Integer(n), e / 2)));
    return sqrt_enclosure(Rational(p), digits);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Riemann zeta at integers s >= 2.
//
// Euler-Maclaurin with N terms and p correction terms:
//   zeta(s) = sum_{k<N} k^-s + N^{1-s}/(s-1) + N^{-s}/2 + sum_{j<=p} T_j + E,
//   T_j = B_{2j}/(2j)! · s(s+1)···(s+2j-2) · N^{1-s-2j},   |E| <= |T_{p+1}|  (real s).
inline Interval zeta_uncached(long s, int precision) {
    if (s < 2) throw std::domain_error("zeta: s must be an integer >= 2");
    const int work = precision + 10;
    const Rational target(1, pow10(precision + 5));
    for (unsigned long N = 16 + 2 * static_cast<unsigned long>(precision);; N *= 2) {
        const std::size_t p_max = 120;
        static const auto bern = detail::bernoulli_numbers(2 * p_max + 4);
        Interval sum(Rational(0));
        for (unsigned long k = 1; k < N; ++k)
            sum = sum + detail::rounded(Rational(Integer(1), pow_int(Integer(k), static_cast<unsigned long>(s))), work);
        const Integer Ns = pow_int(Integer(N), static_cast<unsigned long>(s));
        sum = sum + detail::rounded(Rational(Integer(N), Ns * (s - 1)), work);
        sum = sum + detail::rounded(Rational(Integer(1), Ns * 2), work);

        // rising = s(s+1)···(s+2j-2), fact = (2j)!, npow = N^{s+2j-1}
        Integer rising = s, fact = 2;
        Integer npow = Ns * N;
        for (std::size_t j = 1; j <= p_max; ++j) {
            const Rational tj = bern[2 * j] * Rational(rising, fact * npow);
            // Candidate remainder bound |T_{j+1}|.
            const Integer rising_next = rising * (s + 2 * static_cast<long>(j) - 1) * (s + 2 * static_cast<long>(j));
            const Integer fact_next = fact * (2 * j + 1) * (2 * j + 2);
            const Integer npow_next = npow * N * N;
            const Rational next = abs(bern[2 * j + 2] * Rational(rising_next, fact_next * npow_next));
            sum = sum + detail::rounded(tj, work);
            if (next < target) return (sum + Interval(-next, next)).round_out(precision + 2);
            if (next > abs(tj)) break; // series started diverging for this N
            rising = rising_next;
            fact = fact_next;
            npow = npow_next;
        }
    }
}

// Holds cached zeta enclosures; safe for concurrent use.
class ZetaContext {
  public:
    explicit ZetaContext(int precision = kDefaultPrecision) : precision_(precision) {
        if (precision < 1) throw std::invalid_argument("precision must be positive");
    }

    int precision() const noexcept { return precision_; }

    Interval zeta(long s) const {
        if (s < 2) throw std::domain_error("zeta: s must be an integer >= 2");
        std::lock_guard lock(mu_);
        auto it = cache_.find(s);
        if (it == cache_.end()) it = cache_.emplace(s, zeta_uncached(s, precision_)).first;
        return it->second;
    }

  private:
    int precision_;
    mutable std::mutex mu_;
    mutable std::map<long, Interval> cache_;
};

inline Interval zeta(long s, const ZetaContext& ctx) { return ctx.zeta(s); }

// prod_{i=2}^{inf} zeta(i)^{-1}; the tail prod_{i>M} lies in [1 - 2^{1-M}, 1].
inline Interval zeta_hat(const ZetaContext& ctx) {
    const int work = ctx.precision() + 10;
    long M = 2;
    const Integer bound = pow10(ctx.precision() + 3);
    while (Integer(1) << static_cast<unsigned long>(M - 1) < bound) ++M;
    Interval prod(Rational(1));
    for (long i = 2; i <= M; ++i) prod = (prod / ctx.zeta(i)).round_out(work);
    const Rational tail_lo = 1 - Rational(Integer(1), Integer(1) << static_cast<unsigned long>(M - 1));
    return (prod * Interval(tail_lo, Rational(1))).round_out(ctx.precision() + 2);
}

// prod_{j=m-n+1}^{m} zeta(j)^{-1}: limiting probability that an n×m integer
// matrix with uniform columns is unimodular. Exactly 0 for m = n.
inline Interval ideal_probability(long n, long m, const ZetaContext& ctx) {
    if (n < 1) throw std::invalid_argument("ideal_probability: n must be >= 1");
    if (m < n) throw std::invalid_argument("ideal_probability: m < n");
    if (m == n) return Interval(Rational(0));
    Interval prod(Rational(1));
    for (long j = m - n + 1; j <= m; ++j) prod = (prod / ctx.zeta(j)).round_out(ctx.precision() + 10);
    return prod.round_out(ctx.precision() + 2);
}

// ---------------------------------------------------------------------------
// Full-rank sublattice bound.

// P_k = n^{k/2} (j+2)^k 2^{n-k} / (j-2)^n: probability bound that the (k+1)-th
// window sample falls in the span of k independent ones, window B = j·nu.
inline Interval pk_bound(long n, const Interval& j, long k, int precision = kDefaultPrecision) {
    if (n < 1 || k < 0 || k >= n) throw std::invalid_argument("pk_bound: need 0 <= k < n");
    if (!(j.lo() > 2)) throw std::domain_error("pk_bound: j must exceed 2");
    const int work = precision + 10;
    const Interval nk = detail::half_power(static_cast<unsigned long>(n), static_cast<unsigned long>(k), work);
    const Interval two(Rational(2));
    const Interval num = nk * (j + two).pow(static_cast<unsigned>(k)) *
                         Interval(Rational(pow_int(Integer(2), static_cast<unsigned long>(n - k))));
    return (num / (j - two).pow(static_cast<unsigned>(n))).round_out(work);
}

inline Interval pk_bound(long n, const Rational& j, long k, int precision = kDefaultPrecision) {
    return pk_bound(n, Interval(j), k, precision);
}

// j = 8 n^{n/2}, the window ratio the full-rank corollary assumes.
inline Interval critical_ratio(long n, int precision = kDefaultPrecision) {
    return Interval(Rational(8)) * detail::half_power(static_cast<unsigned long>(n), static_cast<unsigned long>(n),
                                                      precision + 10);
}

// prod_{k=0}^{n-1} (1 - P_k) at j = 8 n^{n/2}.
inline Interval fullrank_lower_bound(long n, int precision = kDefaultPrecision) {
    if (n < 1) throw std::invalid_argument("fullrank_lower_bound: n must be >= 1");
    const Interval j = critical_ratio(n, precision);
    Interval prod(Rational(1));
    for (long k = 0; k < n; ++k)
        prod = (prod * (Interval(Rational(1)) - pk_bound(n, j, k, precision))).round_out(precision + 10);
    return prod.round_out(precision + 2);
}

namespace detail {

// The alpha product without the n >= 2 restriction; n = 1 is used only to
// cross-check published per-dimension values.
inline Interval alpha_product(long n, const ZetaContext& ctx) {
    const Interval group_part = ideal_probability(n, n + 1, ctx) - Interval(Rational(1, 4));
    return (group_part * fullrank_lower_bound(n, ctx.precision())).round_out(ctx.precision() + 2);
}

} // namespace detail

// (prod_{i=2}^{n+1} zeta(i)^{-1} - 1/4) · fullrank_lower_bound(n).
inline Interval alpha(long n, const ZetaContext& ctx) {
    if (n < 2) throw std::invalid_argument("alpha: n must be >= 2");
    return detail::alpha_product(n, ctx);
}

struct BoundReport {
    long n = 0;
    Interval j;                      // window ratio B/nu
    std::vector<Interval> pk_values; // P_0 .. P_{n-1}
    Interval fullrank_lower;
    Interval alpha_n; // meaningful for n >= 2
    int precision = kDefaultPrecision;
};

inline BoundReport bound_report(long n, const ZetaContext& ctx) {
    BoundReport r;
    r.n = n;
    r.precision = ctx.precision();
    r.j = critical_ratio(n, ctx.precision());
    for (long k = 0; k < n; ++k) r.pk_values.push_back(pk_bound(n, r.j, k, ctx.precision()));
    r.fullrank_lower = fullrank_lower_bound(n, ctx.precision());
    if (n >= 2) r.alpha_n = alpha(n, ctx);
    return r;
}

// ---------------------------------------------------------------------------
// Quotient sampling.

// 1 - (B1 - 2 nu1)^n / (B1 + 2 nu)^n; increasing in both covering-radius
// arguments, so upper bounds on them give a valid bound.
inline Rational tv_bound(long n, const Rational& B1, const Rational& nu1_upper, const Rational& nu_upper) {
    if (n < 1) throw std::invalid_argument("tv_bound: n must be >= 1");
    if (!(B1 > 2 * nu1_upper)) throw std::domain_error("tv_bound: requires B1 > 2·nu(sublattice)");
    const Rational ratio = (B1 - 2 * nu1_upper) / (B1 + 2 * nu_upper);
    return 1 - pow_rat(ratio, static_cast<unsigned long>(n));
}

struct WindowThresholds {
    Rational B_min;  // 8 n^{n/2} nu, rounded up
    Rational B1_min; // 8 n^2 (n+1) B_min
};

namespace detail {
inline Rational min_window(long n, const Rational& nu_upper, int precision) {
    return 8 * detail::half_power(static_cast<unsigned long>(n), static_cast<unsigned long>(n), precision).hi() *
           nu_upper;
}
} // namespace detail

inline WindowThresholds window_thresholds(long n, const Rational& nu_upper, int precision = kDefaultPrecision) {
    if (n < 2) throw std::domain_error("window_thresholds: the two-window theorem needs n >= 2");
    if (sgn(nu_upper) <= 0) throw std::invalid_argument("window_thresholds: nu must be positive");
    WindowThresholds t;
    t.B_min = detail::min_window(n, nu_upper, precision);
    t.B1_min = 8 * n * n * (n + 1) * t.B_min;
    return t;
}

// ---------------------------------------------------------------------------
// Coprimality (the n = 1 case).

inline constexpr std::uint64_t kTotientSieveLimit = 10'000'000;

// phi(0..N) by the smallest-prime-factor linear sieve; phi[0] = 0.
inline std::vector<std::uint32_t> totient_table(std::uint64_t N) {
    if (N > kTotientSieveLimit) throw std::invalid_argument("totient sieve limit exceeded");
    std::vector<std::uint32_t> phi(N + 1, 0);
    std::vector<std::uint32_t> primes;
    if (N >= 1) phi[1] = 1;
    for (std::uint64_t i = 2; i <= N; ++i) {
        if (phi[i] == 0) {
            phi[i] = static_cast<std::uint32_t>(i - 1);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            const std::uint64_t ip = i * p;
            if (ip > N) break;
            if (i % p == 0) {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    return phi;
}

// sum_{k=1}^{N} phi(k).
inline std::uint64_t totient_summatory(std::uint64_t N) {
    if (N < 1) throw std::invalid_argument("totient_summatory: N must be >= 1");
    const auto phi = totient_table(N);
    std::uint64_t s = 0;
    for (std::uint64_t k = 1; k <= N; ++k) s += phi[k];
    return s;
}

// Exact probability that two uniform integers in [0, N] are coprime:
// (2·sum phi + 1) / (N+1)^2.
inline Rational coprime_prob_exact(std::uint64_t N) {
    const std::uint64_t s = totient_summatory(N);
    Rational p(Integer(2) * Integer(static_cast<unsigned long>(s)) + 1,
               pow_int(Integer(static_cast<unsigned long>(N + 1)), 2));
    p.canonicalize();
    return p;
}

// 3N/2 + N log N, the error bound for sum phi(k) - N^2/(2 zeta(2)).
inline Interval lehmer_delta_bound(std::uint64_t N, int precision = kDefaultPrecision) {
    if (N < 1) throw std::invalid_argument("lehmer_delta_bound: N must be >= 1");
    const Rational n(Integer(static_cast<unsigned long>(N)));
    return (Interval(Rational(3, 2) * n) + Interval(n) * log_enclosure(n, precision + 5)).round_out(precision);
}

// |sum phi(k) - N^2 / (2 zeta(2))| as an enclosure.
inline Interval lehmer_residual(std::uint64_t N, const ZetaContext& ctx) {
    const Rational s(Integer(static_cast<unsigned long>(totient_summatory(N))));
    const Rational n2 = pow_rat(Rational(Integer(static_cast<unsigned long>(N))), 2);
    const Interval r = Interval(s) - Interval(n2) / (Interval(Rational(2)) * ctx.zeta(2));
    if (sgn(r.lo()) >= 0) return r;
    if (sgn(r.hi()) <= 0) return -r;
    const Rational neg_lo = -r.lo();
    return {Rational(0), neg_lo > r.hi() ? neg_lo : r.hi()};
}

} // namespace latgen
