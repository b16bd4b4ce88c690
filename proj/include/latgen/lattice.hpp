// include/latgen/lattice.hpp: full-rank lattices with exact bases.
//
// A LatticeBasis holds the basis vectors as the columns of a rational matrix M,
// so Lambda = M·Z^n and Phi(a) = M a maps coordinates to lattice vectors.

#pragma once

#include "latgen/bounds.hpp"
#include "latgen/exactmat.hpp"
#include "latgen/interval.hpp"
#include "latgen/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace latgen {

struct NotInLattice : std::invalid_argument {
    NotInLattice() : std::invalid_argument("vector is not in the lattice") {}
};

// Lattice points are enumerated only when their count is predicted to stay below this.
inline constexpr double kEnumerationGuard = 1e7;
// Box size cap for shortest-vector and window scans.
inline constexpr double kBoxGuard = 5e7;

struct Window {
    Rational B;
    std::size_t n;

    Window(Rational bound, std::size_t dim) : B(std::move(bound)), n(dim) {
        if (sgn(B) <= 0) throw std::invalid_argument("window bound must be positive");
    }

    // Half-open membership: 0 <= x_i < B.
    bool contains(std::span<const Rational> x) const {
        return std::all_of(x.begin(), x.end(), [&](const Rational& c) { return sgn(c) >= 0 && c < B; });
    }
};

inline Rational squared_norm(std::span<const Rational> v) {
    Rational s = 0;
    for (const auto& x : v) s += x * x;
    return s;
}

namespace detail {

// LLL-reduced basis M·U (delta = 0.99). The reduction steps are chosen in long
// double but applied exactly, so the result spans the same lattice whatever the
// rounding; only the quality of the reduction depends on floating point.
inline RationalMatrix reduced_basis(const RationalMatrix& M) {
    const std::size_t n = M.cols();
    RationalMatrix R = M;
    std::vector<std::vector<long double>> b(n, std::vector<long double>(M.rows()));
    auto load = [&](std::size_t j) {
        for (std::size_t i = 0; i < M.rows(); ++i) b[j][i] = R(i, j).get_d();
    };
    for (std::size_t j = 0; j < n; ++j) load(j);
    auto dot = [](const std::vector<long double>& x, const std::vector<long double>& y) {
        long double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    };
    std::vector<std::vector<long double>> bs(n);
    std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0));
    std::vector<long double> B(n);
    auto gram_schmidt = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            bs[i] = b[i];
            for (std::size_t j = 0; j < i; ++j) {
                mu[i][j] = B[j] > 0 ? dot(b[i], bs[j]) / B[j] : 0;
                for (std::size_t r = 0; r < bs[i].size(); ++r) bs[i][r] -= mu[i][j] * bs[j][r];
            }
            B[i] = dot(bs[i], bs[i]);
        }
    };
    gram_schmidt();
    std::size_t k = 1, steps = 0;
    const std::size_t max_steps = 10000 * (n + 1) * (n + 1);
    while (k < n && steps++ < max_steps) {
        for (std::size_t j = k; j-- > 0;) {
            const long double q = std::round(mu[k][j]);
            if (q == 0 || !std::isfinite(q)) continue;
            const Rational qr(static_cast<double>(q));
            for (std::size_t i = 0; i < R.rows(); ++i) R(i, k) -= qr * R(i, j);
            load(k);
            gram_schmidt();
        }
        if (B[k] >= (0.99L - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            ++k;
        } else {
            R.swap_columns(k, k - 1);
            std::swap(b[k], b[k - 1]);
            gram_schmidt();
            k = std::max<std::size_t>(k - 1, 1);
        }
    }
    return R;
}

} // namespace detail

class LatticeBasis {
  public:
    explicit LatticeBasis(RationalMatrix basis, int precision = kDefaultPrecision)
        : n_(basis.rows()), basis_(std::move(basis)), precision_(precision) {
        if (!basis_.square() || n_ == 0) throw std::invalid_argument("lattice basis must be square and nonempty");
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) basis_(i, j).canonicalize();
        const Rational d = latgen::det(basis_);
        if (sgn(d) == 0) throw SingularMatrixError();
        det_ = abs(d);
        inverse_ = latgen::inverse(basis_);
        lambda1_sq_ = shortest_squared_norm();
        nu_upper_ = covering_bound();
    }

    explicit LatticeBasis(const ExactMatrix& basis, int precision = kDefaultPrecision)
        : LatticeBasis(to_rational(basis), precision) {}

    static LatticeBasis integer_lattice(std::size_t n) { return LatticeBasis(RationalMatrix::identity(n)); }

    std::size_t dim() const noexcept { return n_; }
    const RationalMatrix& basis() const noexcept { return basis_; }
    const RationalMatrix& inverse_basis() const noexcept { return inverse_; }
    const Rational& det() const noexcept { return det_; }
    // Exact squared length of a shortest nonzero vector.
    const Rational& lambda1_squared() const noexcept { return lambda1_sq_; }
    // Rational upper bound 1/2 n^{n/2+1} det / lambda1^{n-1} on the covering radius.
    const Rational& nu_upper() const noexcept { return nu_upper_; }
    int precision() const noexcept { return precision_; }

    RatVector basis_vector(std::size_t i) const { return basis_.column(i); }

    RatVector vector_at(std::span<const Integer> coords) const {
        RatVector a(coords.begin(), coords.end());
        return basis_.apply(a);
    }

    // Phi^{-1}(v) when v is in the lattice, std::nullopt otherwise.
    std::optional<IntVector> try_coordinates(std::span<const Rational> v) const {
        if (v.size() != n_) throw std::invalid_argument("vector dimension mismatch");
        RatVector a = inverse_.apply(v);
        IntVector out;
        out.reserve(n_);
        for (const auto& q : a) {
            if (!is_integral(q)) return std::nullopt;
            out.push_back(q.get_num());
        }
        return out;
    }

    IntVector coordinates(std::span<const Rational> v) const {
        auto c = try_coordinates(v);
        if (!c) throw NotInLattice();
        return *c;
    }

    bool contains(std::span<const Rational> v) const { return try_coordinates(v).has_value(); }

    LatticeBasis scaled(const Rational& c) const {
        return LatticeBasis(basis_.map<Rational>([&](const Rational& x) { return Rational(x * c); }), precision_);
    }

    // Integer description of Phi^{-1}([0,B)^n) for enumeration and sampling.
    LinearRegion window_region(const Window& w) const {
        if (w.n != n_) throw std::invalid_argument("window dimension mismatch");
        Integer L = w.B.get_den();
        for (const auto& x : basis_.entries()) L = lcm(L, x.get_den());
        ExactMatrix T(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) T(i, j) = Rational(basis_(i, j) * L).get_num();
        const Integer D = Rational(w.B * L).get_num();
        IntVector lo(n_), hi(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            Rational mn = 0, mx = 0;
            for (std::size_t j = 0; j < n_; ++j) {
                const Rational e = w.B * inverse_(i, j);
                if (sgn(e) < 0) mn += e;
                else mx += e;
            }
            // The extremes come from coordinates equal to B, which the window excludes.
            lo[i] = sgn(mn) < 0 ? floor_of(mn) + 1 : Integer(0);
            hi[i] = sgn(mx) > 0 ? ceil_of(mx) - 1 : Integer(0);
        }
        return LinearRegion(std::move(T), IntVector(n_, Integer(0)), D, std::move(lo), std::move(hi));
    }

  private:
    Rational shortest_squared_norm() const {
        // On a reduced basis R, ||R c|| <= r forces |c_i| <= ||row_i(R^{-1})|| r,
        // with r the shortest column of R.
        const RationalMatrix R = detail::reduced_basis(basis_);
        const RationalMatrix Rinv = latgen::inverse(R);
        Rational r2 = squared_norm(R.column(0));
        for (std::size_t i = 1; i < n_; ++i) r2 = std::min(r2, squared_norm(R.column(i)));
        std::vector<Integer> K(n_);
        double box = 1;
        for (std::size_t i = 0; i < n_; ++i) {
            Rational row2 = 0;
            for (std::size_t j = 0; j < n_; ++j) row2 += Rinv(i, j) * Rinv(i, j);
            K[i] = isqrt(floor_of(row2 * r2));
            box *= 2.0 * K[i].get_d() + 1.0;
        }
        if (box > kBoxGuard) throw GuardExceeded("shortest-vector scan box too large", box);
        Rational best = r2;
        IntVector c(n_);
        for (std::size_t i = 0; i < n_; ++i) c[i] = -K[i];
        RatVector v(n_);
        for (;;) {
            // Visit only c with first nonzero coordinate positive (c and -c have equal norm).
            std::size_t lead = 0;
            while (lead < n_ && sgn(c[lead]) == 0) ++lead;
            if (lead < n_ && sgn(c[lead]) > 0) {
                Rational s = 0;
                for (std::size_t i = 0; i < n_; ++i) {
                    Rational x = 0;
                    for (std::size_t j = 0; j < n_; ++j) x += R(i, j) * c[j];
                    s += x * x;
                }
                if (s < best) best = s;
            }
            std::size_t i = n_;
            bool done = true;
            while (i > 0) {
                --i;
                if (c[i] < K[i]) {
                    c[i] += 1;
                    done = false;
                    break;
                }
                c[i] = -K[i];
            }
            if (done) break;
        }
        return best;
    }

    Rational covering_bound() const {
        const auto n = static_cast<unsigned long>(n_);
        const int digits = precision_ + 5;
        const Rational n_pow = detail::half_power(n, n + 2, digits).hi(); // n^{n/2+1}
        Rational lam_pow;                                                 // lambda1^{n-1}, from below
        if ((n - 1) % 2 == 0) {
            lam_pow = pow_rat(lambda1_sq_, (n - 1) / 2);
        } else {
            const Rational lam_lo = sqrt_enclosure(lambda1_sq_, digits).lo();
            if (sgn(lam_lo) == 0) throw std::domain_error("shortest vector below working precision");
            lam_pow = pow_rat(lambda1_sq_, (n - 2) / 2) * lam_lo;
        }
        return n_pow * det_ / (2 * lam_pow);
    }

    std::size_t n_;
    RationalMatrix basis_;
    RationalMatrix inverse_;
    int precision_;
    Rational det_;
    Rational lambda1_sq_;
    Rational nu_upper_;
};

// ---------------------------------------------------------------------------

inline Rational covering_radius_upper(const LatticeBasis& L) { return L.nu_upper(); }

// Grid oracle for the covering radius, n <= 3: the largest distance from a point
// (i_1/res, ..., i_n/res) of the fundamental parallelepiped to the lattice.
// This under-estimates nu and converges to it from below as res grows; the
// floating-point maximum is shaded down by a relative 1e-12 before conversion.
inline Rational covering_radius_estimate(const LatticeBasis& L, unsigned grid_resolution) {
    const std::size_t n = L.dim();
    if (n > 3) throw std::invalid_argument("covering_radius_estimate supports n <= 3 only");
    if (grid_resolution == 0) throw std::invalid_argument("grid resolution must be positive");
    // Any fundamental parallelepiped works; a reduced one keeps the candidate set small.
    const RationalMatrix R = detail::reduced_basis(L.basis());
    const RationalMatrix Rinv = inverse(R);
    std::vector<long double> M(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M[i * n + j] = R(i, j).get_d();
    // Nearest lattice point to a point of the cell has |c - a| <= ||M^-1||_F · (1/2) sum ||b_i||.
    long double half_diag = 0, finv = 0;
    for (std::size_t j = 0; j < n; ++j) {
        long double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += M[i * n + j] * M[i * n + j];
        half_diag += std::sqrt(s) / 2;
    }
    for (const auto& x : Rinv.entries()) finv += x.get_d() * x.get_d();
    const long K = static_cast<long>(std::ceil(std::sqrt(finv) * half_diag)) + 1;

    // Candidate lattice points M c with c_i in [-K, K+1].
    std::vector<long double> cand;
    {
        std::vector<long> c(n, -K);
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) {
                long double x = 0;
                for (std::size_t j = 0; j < n; ++j) x += M[i * n + j] * static_cast<long double>(c[j]);
                cand.push_back(x);
            }
            std::size_t i = n;
            bool done = true;
            while (i > 0) {
                --i;
                if (c[i] < K + 1) {
                    ++c[i];
                    done = false;
                    break;
                }
                c[i] = -K;
            }
            if (done) break;
        }
    }
    const std::size_t count = cand.size() / n;

    long double worst = 0;
    std::vector<unsigned> g(n, 0);
    std::vector<long double> x(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) {
            long double s = 0;
            for (std::size_t j = 0; j < n; ++j)
                s += M[i * n + j] * static_cast<long double>(g[j]) / static_cast<long double>(grid_resolution);
            x[i] = s;
        }
        long double best = std::numeric_limits<long double>::max();
        for (std::size_t k = 0; k < count; ++k) {
            long double d = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const long double t = x[i] - cand[k * n + i];
                d += t * t;
            }
            best = std::min(best, d);
        }
        worst = std::max(worst, best);
        std::size_t i = n;
        bool done = true;
        while (i > 0) {
            --i;
            if (g[i] + 1 < grid_resolution) {
                ++g[i];
                done = false;
                break;
            }
            g[i] = 0;
        }
        if (done) break;
    }
    const double est = static_cast<double>(std::sqrt(worst) * (1.0L - 1e-12L));
    return Rational(est);
}

// (B + 2 nu_upper)^n / det, the predicted window count.
inline Rational predicted_window_count(const LatticeBasis& L, const Window& W) {
    return pow_rat(W.B + 2 * L.nu_upper(), static_cast<unsigned long>(L.dim())) / L.det();
}

// Coordinates a with M a in [0,B)^n, lexicographic order.
inline std::vector<IntVector> enumerate_window_coordinates(const LatticeBasis& L, const Window& W) {
    if (L.dim() > 4) throw std::invalid_argument("window enumeration supports n <= 4 only");
    const double predicted = predicted_window_count(L, W).get_d();
    if (predicted > kEnumerationGuard) throw GuardExceeded("window enumeration guard exceeded", predicted);
    const LinearRegion region = L.window_region(W);
    const double box = region.box_volume().get_d();
    if (box > kBoxGuard) throw GuardExceeded("window enumeration box too large", box);
    std::vector<IntVector> out;
    region.for_each_point([&](const IntVector& a) { out.push_back(a); });
    return out;
}

// Lambda ∩ [0,B)^n, ordered lexicographically by coordinate vector.
inline std::vector<RatVector> enumerate_window(const LatticeBasis& L, const Window& W) {
    std::vector<RatVector> out;
    for (const auto& a : enumerate_window_coordinates(L, W)) out.push_back(L.vector_at(a));
    return out;
}

inline std::size_t rank_of_span(std::span<const RatVector> vectors) {
    if (vectors.empty()) return 0;
    const std::size_t n = vectors.front().size();
    return rank(RationalMatrix::from_columns(vectors, n));
}

// |Lambda ∩ H ∩ [0,B)^n| for H the span of `spanning` (rank k, 1 <= k < n).
inline std::size_t count_in_hyperplane(const LatticeBasis& L, const Window& W, std::span<const RatVector> spanning) {
    const std::size_t n = L.dim();
    const std::size_t k = rank_of_span(spanning);
    if (k != spanning.size() || k < 1 || k >= n)
        throw std::invalid_argument("hyperplane must be spanned by 1 <= k < n independent vectors");
    std::vector<RatVector> cols(spanning.begin(), spanning.end());
    cols.emplace_back();
    std::size_t count = 0;
    for (auto& p : enumerate_window(L, W)) {
        cols.back() = std::move(p);
        if (rank_of_span(cols) == k) ++count;
    }
    return count;
}

// <vectors> = Lambda, decided on coordinates: the matrix of Phi^{-1}(v_i) is unimodular.
inline bool generates_lattice(const LatticeBasis& L, std::span<const RatVector> vectors) {
    const std::size_t n = L.dim();
    ExactMatrix C(n, vectors.size());
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        const IntVector c = L.coordinates(vectors[j]);
        for (std::size_t i = 0; i < n; ++i) C(i, j) = c[i];
    }
    return is_unimodular(C);
}

} // namespace latgen
