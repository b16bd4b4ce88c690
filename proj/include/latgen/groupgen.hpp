// include/latgen/groupgen.hpp: finite abelian groups in invariant-factor form
// and the probability that t uniform elements generate them.

#pragma once

#include "latgen/bounds.hpp"
#include "latgen/exactmat.hpp"
#include "latgen/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace latgen {

// Z/d_1 × ... × Z/d_k with d_1 | d_2 | ... | d_k, every d_i >= 2.
class FiniteAbelianGroup {
  public:
    FiniteAbelianGroup() = default;

    // Any list of positive moduli; normalized to invariant factors (a Smith
    // form of the diagonal, factors equal to 1 dropped).
    explicit FiniteAbelianGroup(const IntVector& moduli) {
        for (const auto& d : moduli)
            if (sgn(d) <= 0) throw std::invalid_argument("group moduli must be positive");
        if (moduli.empty()) return;
        ExactMatrix diag(moduli.size(), moduli.size());
        for (std::size_t i = 0; i < moduli.size(); ++i) diag(i, i) = moduli[i];
        for (auto& d : snf(diag))
            if (d != 1) factors_.push_back(d);
    }
    FiniteAbelianGroup(std::initializer_list<long> moduli)
        : FiniteAbelianGroup(IntVector(moduli.begin(), moduli.end())) {}

    const IntVector& invariant_factors() const noexcept { return factors_; }
    // Minimal number of generators.
    std::size_t rank() const noexcept { return factors_.size(); }
    bool trivial() const noexcept { return factors_.empty(); }

    Integer order() const {
        Integer o = 1;
        for (const auto& d : factors_) o *= d;
        return o;
    }

    std::string to_string() const {
        if (factors_.empty()) return "1";
        std::string s;
        for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? " x Z/" : "Z/") + factors_[i].get_str();
        return s;
    }

    friend bool operator==(const FiniteAbelianGroup&, const FiniteAbelianGroup&) = default;

  private:
    IntVector factors_;
};

struct GroupElement {
    IntVector coords; // coords[i] in [0, d_i)
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

inline GroupElement make_element(const FiniteAbelianGroup& G, IntVector coords) {
    const auto& d = G.invariant_factors();
    if (coords.size() != d.size()) throw std::invalid_argument("element has wrong number of coordinates");
    for (std::size_t i = 0; i < d.size(); ++i) {
        Integer r;
        mpz_fdiv_r(r.get_mpz_t(), coords[i].get_mpz_t(), d[i].get_mpz_t());
        coords[i] = r;
    }
    return {std::move(coords)};
}

// ---------------------------------------------------------------------------
// Quotients of lattices.

// Sends lattice vectors (or their coordinates) to coset coordinates in Lambda/Lambda_1.
class QuotientProjection {
  public:
    QuotientProjection(const LatticeBasis& L, ExactMatrix P, IntVector all_divisors)
        : basis_(L), P_(std::move(P)), divisors_(std::move(all_divisors)) {
        for (std::size_t i = 0; i < divisors_.size(); ++i)
            if (divisors_[i] != 1) kept_.push_back(i);
    }

    GroupElement project_coordinates(std::span<const Integer> c) const {
        const IntVector y = P_.apply(c);
        GroupElement e;
        for (std::size_t i : kept_) {
            Integer r;
            mpz_fdiv_r(r.get_mpz_t(), y[i].get_mpz_t(), divisors_[i].get_mpz_t());
            e.coords.push_back(r);
        }
        return e;
    }

    GroupElement operator()(std::span<const Rational> v) const { return project_coordinates(basis_.coordinates(v)); }

  private:
    LatticeBasis basis_;
    ExactMatrix P_;
    IntVector divisors_;
    std::vector<std::size_t> kept_;
};

struct QuotientGroup {
    FiniteAbelianGroup group;
    QuotientProjection projection;
    ExactMatrix sub_coordinates; // columns: Phi^{-1} of the sublattice generators
};

// Lambda / Lambda_1 for Lambda_1 spanned by n lattice vectors of full rank.
inline QuotientGroup quotient_group(const LatticeBasis& L, std::span<const RatVector> sub) {
    const std::size_t n = L.dim();
    if (sub.size() != n) throw std::invalid_argument("quotient_group: need exactly n sublattice generators");
    ExactMatrix S(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const IntVector c = L.coordinates(sub[j]);
        for (std::size_t i = 0; i < n; ++i) S(i, j) = c[i];
    }
    if (sgn(det(S)) == 0) throw std::invalid_argument("quotient_group: sublattice is not of full rank");
    auto snf_res = snf_with_transforms(S);
    IntVector divisors = snf_res.divisors;
    FiniteAbelianGroup G(divisors);
    return {std::move(G), QuotientProjection(L, std::move(snf_res.P), std::move(divisors)), std::move(S)};
}

// ---------------------------------------------------------------------------
// Exact generation probabilities.

// Distinct prime divisors by trial division.
inline std::vector<Integer> prime_divisors(Integer m) {
    std::vector<Integer> out;
    m = abs(m);
    for (Integer p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p == 0) {
            out.push_back(p);
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) out.push_back(m);
    return out;
}

// Probability that t uniform elements generate a p-group with d generators:
// prod_{i=t-d+1}^{t} (1 - p^{-i}); zero when t < d.
inline Rational lambda_t_pgroup(const Integer& p, std::size_t d, std::size_t t) {
    if (t < d) return 0;
    Rational prod = 1;
    for (std::size_t i = t - d + 1; i <= t; ++i) prod *= 1 - Rational(Integer(1), pow_int(p, i));
    return prod;
}

// Product over the primes p dividing |G| of lambda_t for the p-Sylow subgroup,
// whose generator count is the number of invariant factors divisible by p.
inline Rational generation_prob_exact(const FiniteAbelianGroup& G, std::size_t t) {
    if (t < G.rank()) return 0;
    if (G.trivial()) return 1;
    Rational prob = 1;
    const auto& d = G.invariant_factors();
    for (const auto& p : prime_divisors(d.back())) {
        std::size_t dp = 0;
        for (const auto& di : d)
            if (di % p == 0) ++dp;
        prob *= lambda_t_pgroup(p, dp, t);
    }
    return prob;
}

// True iff the elements generate G: their coordinate columns together with
// diag(d_1, ..., d_k) generate Z^k.
inline bool generates(const FiniteAbelianGroup& G, std::span<const GroupElement> elems) {
    const std::size_t k = G.rank();
    if (k == 0) return true;
    ExactMatrix M(k, elems.size() + k);
    for (std::size_t j = 0; j < elems.size(); ++j) {
        if (elems[j].coords.size() != k) throw std::invalid_argument("element has wrong number of coordinates");
        for (std::size_t i = 0; i < k; ++i) M(i, j) = elems[j].coords[i];
    }
    for (std::size_t i = 0; i < k; ++i) M(i, elems.size() + i) = G.invariant_factors()[i];
    return is_unimodular(M);
}

inline constexpr double kBruteForceGuard = 1e7;

namespace detail {

// Counts generating tuples below a fixed prefix. `span` is the HNF basis
// (k×k, lower triangular) of the prefix elements together with diag(d); the
// same unimodularity test as generates() is applied to [span | x].
inline std::uint64_t count_generating(const std::vector<std::vector<Checked64>>& elements, const Matrix<Checked64>& span,
                                      std::size_t remaining, Matrix<Checked64>& work) {
    const std::size_t k = span.rows();
    std::uint64_t count = 0;
    if (remaining == 1) {
        for (const auto& x : elements) {
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) work(i, j) = span(i, j);
                work(i, k) = x[i];
            }
            if (is_unimodular_inplace(work)) ++count;
        }
        return count;
    }
    Matrix<Checked64> ext(k, k + 1);
    for (const auto& x : elements) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) ext(i, j) = span(i, j);
            ext(i, k) = x[i];
        }
        const auto h = hnf(ext).H;
        Matrix<Checked64> next(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) next(i, j) = h(i, j);
        count += count_generating(elements, next, remaining - 1, work);
    }
    return count;
}

} // namespace detail

// Exhaustive count of generating t-tuples over all |G|^t tuples.
inline Rational generation_prob_bruteforce(const FiniteAbelianGroup& G, std::size_t t) {
    const double total = std::pow(G.order().get_d(), static_cast<double>(t));
    if (total > kBruteForceGuard) throw GuardExceeded("brute-force generation count too large", total);
    const std::size_t k = G.rank();
    if (k == 0) return 1;
    if (t == 0) return 0;
    const auto& d = G.invariant_factors();

    std::vector<std::vector<Checked64>> elements;
    std::vector<Checked64> e(k, Checked64(0));
    for (;;) {
        elements.push_back(e);
        std::size_t i = k;
        bool done = true;
        while (i > 0) {
            --i;
            if (e[i].value() + 1 < d[i].get_si()) {
                e[i] = e[i] + Checked64(1);
                done = false;
                break;
            }
            e[i] = Checked64(0);
        }
        if (done) break;
    }
    Matrix<Checked64> span(k, k);
    for (std::size_t i = 0; i < k; ++i) span(i, i) = Checked64(d[i].get_si());
    Matrix<Checked64> work(k, k + 1);
    const std::uint64_t good = detail::count_generating(elements, span, t, work);
    Rational p(Integer(static_cast<unsigned long>(good)), pow_int(G.order(), t));
    p.canonicalize();
    return p;
}

// Every abelian group of order exactly m, one per invariant-factor chain.
inline std::vector<FiniteAbelianGroup> abelian_groups_of_order(long m) {
    if (m < 1) throw std::invalid_argument("group order must be positive");
    std::vector<FiniteAbelianGroup> out;
    IntVector chain;
    // Extends d_1 | d_2 | ... with factors that are multiples of the last one.
    std::function<void(long, long)> extend = [&](long rest, long last) {
        if (rest == 1) {
            out.emplace_back(chain);
            return;
        }
        for (long d = last; d <= rest; d += last) {
            if (d < 2 || rest % d) continue;
            chain.push_back(Integer(d));
            extend(rest / d, d);
            chain.pop_back();
        }
    };
    extend(m, 1);
    return out;
}

// ---------------------------------------------------------------------------
// Lower bound check for t = n + 1.

struct Proposition1Entry {
    std::size_t n;
    FiniteAbelianGroup group;
    Rational probability;      // generation_prob_exact(group, n + 1)
    Interval zeta_product_inv; // prod_{i=2}^{n+1} zeta(i)^{-1}
    bool pass;
};

struct CounterexampleEntry {
    std::size_t n;
    std::size_t primes; // j: number of distinct primes in p_1···p_j
    Rational probability;
};

struct Proposition1Report {
    std::vector<Proposition1Entry> entries;
    std::vector<CounterexampleEntry> counterexamples;
    Interval zeta_hat;
    bool zeta_product_above_zeta_hat = true;
    bool counterexamples_decrease = true;
    bool all_pass() const {
        if (!zeta_product_above_zeta_hat || !counterexamples_decrease) return false;
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

// For every n <= n_max and a library of groups with at most n invariant
// factors, checks generation_prob_exact(G, n+1) >= prod_{i=2}^{n+1} zeta(i)^{-1}
// >= zeta_hat, plus the n-element counterexample family (Z/(p_1···p_j))^n.
inline Proposition1Report proposition1_check(std::size_t n_max, const ZetaContext& ctx) {
    Proposition1Report rep;
    rep.zeta_hat = zeta_hat(ctx);
    const long primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    for (std::size_t n = 1; n <= n_max; ++n) {
        const Interval bound = ideal_probability(static_cast<long>(n), static_cast<long>(n) + 1, ctx);
        if (!(bound.lo() >= rep.zeta_hat.hi())) rep.zeta_product_above_zeta_hat = false;

        std::vector<FiniteAbelianGroup> library;
        library.emplace_back();
        for (long m = 2; m <= 64; ++m)
            for (auto& g : abelian_groups_of_order(m))
                if (g.rank() <= n) library.push_back(g);
        for (long base : {2L, 6L, 30L, 210L, 2310L}) library.emplace_back(IntVector(n, Integer(base)));
        library.emplace_back(IntVector{Integer(2), Integer(4 * 9 * 25)});

        for (auto& g : library) {
            if (g.rank() > n) continue;
            Rational p = generation_prob_exact(g, n + 1);
            const bool ok = p >= bound.hi();
            rep.entries.push_back({n, g, p, bound, ok});
        }

        Rational prev = 2;
        Integer radical = 1;
        for (std::size_t j = 1; j <= std::size(primes); ++j) {
            radical *= primes[j - 1];
            const FiniteAbelianGroup g(IntVector(n, radical));
            const Rational p = generation_prob_exact(g, n);
            if (!(p < prev)) rep.counterexamples_decrease = false;
            prev = p;
            rep.counterexamples.push_back({n, j, p});
        }
    }
    return rep;
}

} // namespace latgen
