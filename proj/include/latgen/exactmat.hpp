// include/latgen/exactmat.hpp: exact integer / rational matrix algebra.
//
// Hermite normal form convention (column operations):
//   * H = A·U with U unimodular (m×m, det ±1).
//   * H is in lower column-echelon form: pivot column j has its pivot at row
//     r_j with r_0 < r_1 < ...; every entry above a pivot is zero.
//   * pivots are positive; entries left of a pivot, in the pivot row, lie in
//     [0, pivot).
//   * columns that are zero after elimination are collected on the right.
// The columns of A generate Z^n iff the first n columns of H form the identity.

#pragma once

#include "latgen/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace latgen {

template <class T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix entry count mismatch");
    }
    // Row-major nested initializer, convenient in tests: {{1,2},{3,4}}.
    Matrix(std::initializer_list<std::initializer_list<T>> rows) : rows_(rows.size()) {
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    // Builds an n×m matrix whose columns are the given vectors.
    static Matrix from_columns(std::span<const std::vector<T>> columns, std::size_t n) {
        Matrix m(n, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != n) throw std::invalid_argument("column length mismatch");
            for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& entries() const noexcept { return data_; }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const T& x) { return latgen::is_zero(x); });
    }

    void swap_columns(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    void negate_column(std::size_t j) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = -(*this)(i, j);
    }
    void negate_row(std::size_t i) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
    }
    // col[dst] -= f * col[src]
    void sub_column_multiple(std::size_t dst, std::size_t src, const T& f) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) = (*this)(i, dst) - f * (*this)(i, src);
    }
    void sub_row_multiple(std::size_t dst, std::size_t src, const T& f) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) = (*this)(dst, j) - f * (*this)(src, j);
    }
    // (col a, col b) <- (s·a + t·b, u·a + v·b)
    void combine_columns(std::size_t a, std::size_t b, const T& s, const T& t, const T& u, const T& v) {
        for (std::size_t i = 0; i < rows_; ++i) {
            T x = (*this)(i, a), y = (*this)(i, b);
            (*this)(i, a) = s * x + t * y;
            (*this)(i, b) = u * x + v * y;
        }
    }
    void combine_rows(std::size_t a, std::size_t b, const T& s, const T& t, const T& u, const T& v) {
        for (std::size_t j = 0; j < cols_; ++j) {
            T x = (*this)(a, j), y = (*this)(b, j);
            (*this)(a, j) = s * x + t * y;
            (*this)(b, j) = u * x + v * y;
        }
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (latgen::is_zero(a(i, k))) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) = c(i, j) + a(i, k) * b(k, j);
            }
        return c;
    }

    std::vector<T> apply(std::span<const T> v) const {
        if (v.size() != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
        std::vector<T> r(rows_, T(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] = r[i] + (*this)(i, j) * v[j];
        return r;
    }

    template <class U, class F>
    Matrix<U> map(F&& f) const {
        std::vector<U> out;
        out.reserve(data_.size());
        for (const auto& x : data_) out.push_back(f(x));
        return Matrix<U>(rows_, cols_, std::move(out));
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using ExactMatrix = Matrix<Integer>;
using RationalMatrix = Matrix<Rational>;
using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

inline RationalMatrix to_rational(const ExactMatrix& a) {
    return a.map<Rational>([](const Integer& x) { return Rational(x); });
}

// ---------------------------------------------------------------------------
// Hermite normal form

template <class T>
struct HnfResult {
    Matrix<T> H;
    Matrix<T> U;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_rows; // pivot_rows[j] = row of the pivot in column j
};

namespace detail {

// Unimodular 2×2 step (s t; u v) sending (a, b) to (g, 0). When a | b this is a
// plain elimination, which keeps the pivot row in place.
template <class T>
struct Elimination {
    T s, t, u, v;
};

template <class T>
Elimination<T> elimination(const T& a, const T& b) {
    if (!is_zero(a)) {
        const T q = floor_div(b, a);
        if (is_zero(T(b - q * a))) return {T(1), T(0), T(-q), T(1)};
    }
    auto [g, s, t] = ext_gcd(a, b);
    return {s, t, T(-exact_div(b, g)), exact_div(a, g)};
}

// Clears row `row` in columns (col, m) into column `col` by extended-gcd column
// steps; mirrors every step on `U` when given.
template <class T>
void gcd_clear_row(Matrix<T>& H, Matrix<T>* U, std::size_t row, std::size_t col) {
    const std::size_t m = H.cols();
    for (std::size_t j = col + 1; j < m; ++j) {
        if (is_zero(H(row, j))) continue;
        if (is_zero(H(row, col))) {
            H.swap_columns(col, j);
            if (U) U->swap_columns(col, j);
            continue;
        }
        const auto [s, t, u, v] = elimination(H(row, col), H(row, j));
        H.combine_columns(col, j, s, t, u, v);
        if (U) U->combine_columns(col, j, s, t, u, v);
    }
}

} // namespace detail

template <class T>
HnfResult<T> hnf(const Matrix<T>& A) {
    const std::size_t n = A.rows(), m = A.cols();
    HnfResult<T> out{A, Matrix<T>::identity(m), 0, {}};
    auto& H = out.H;
    auto& U = out.U;
    std::size_t col = 0;
    for (std::size_t row = 0; row < n && col < m; ++row) {
        detail::gcd_clear_row(H, &U, row, col);
        if (is_zero(H(row, col))) continue;
        if (sign(H(row, col)) < 0) {
            H.negate_column(col);
            U.negate_column(col);
        }
        const T p = H(row, col);
        for (std::size_t l = 0; l < col; ++l) {
            const T q = floor_div(H(row, l), p);
            if (is_zero(q)) continue;
            H.sub_column_multiple(l, col, q);
            U.sub_column_multiple(l, col, q);
        }
        out.pivot_rows.push_back(row);
        ++col;
    }
    out.rank = col;
    return out;
}

// Columns of H (n×m) generate Z^n; destroys H. Early exit on the first pivot
// that is not 1.
template <class T>
bool is_unimodular_inplace(Matrix<T>& H) {
    const std::size_t n = H.rows(), m = H.cols();
    if (m < n) return false;
    for (std::size_t row = 0; row < n; ++row) {
        detail::gcd_clear_row<T>(H, nullptr, row, row);
        if (!(abs_value(H(row, row)) == T(1))) return false;
    }
    return true;
}

template <class T>
bool is_unimodular(const Matrix<T>& A) {
    Matrix<T> H = A;
    return is_unimodular_inplace(H);
}

// Fast path for hot loops: try 128-bit arithmetic, redo exactly on overflow.
inline bool is_unimodular_fast(const Matrix<Checked128>& A) {
    try {
        return is_unimodular(A);
    } catch (const OverflowError&) {
        return is_unimodular(A.map<Integer>([](Checked128 x) { return to_integer(x); }));
    }
}

// ---------------------------------------------------------------------------
// Smith normal form

template <class T>
struct SnfResult {
    std::vector<T> divisors; // nonzero diagonal, d_1 | d_2 | ...
    Matrix<T> P;             // left transform (rows×rows), unimodular
    Matrix<T> D;             // P·A·Q
    Matrix<T> Q;             // right transform (cols×cols), unimodular
};

template <class T>
SnfResult<T> snf_with_transforms(const Matrix<T>& A) {
    const std::size_t r = A.rows(), c = A.cols();
    Matrix<T> D = A, P = Matrix<T>::identity(r), Q = Matrix<T>::identity(c);
    const std::size_t lim = std::min(r, c);
    std::vector<T> divisors;
    for (std::size_t t = 0; t < lim; ++t) {
        // Pick the nonzero entry of least magnitude as pivot.
        std::optional<std::pair<std::size_t, std::size_t>> best;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j)
                if (!is_zero(D(i, j)) &&
                    (!best || abs_value(D(i, j)) < abs_value(D(best->first, best->second))))
                    best = std::make_pair(i, j);
        if (!best) break;
        D.swap_rows(t, best->first);
        P.swap_rows(t, best->first);
        D.swap_columns(t, best->second);
        Q.swap_columns(t, best->second);

        for (;;) {
            bool dirty = false;
            for (std::size_t i = t + 1; i < r; ++i) {
                if (is_zero(D(i, t))) continue;
                const auto [s, tt, u, v] = detail::elimination(D(t, t), D(i, t));
                D.combine_rows(t, i, s, tt, u, v);
                P.combine_rows(t, i, s, tt, u, v);
            }
            for (std::size_t j = t + 1; j < c; ++j) {
                if (is_zero(D(t, j))) continue;
                const auto [s, tt, u, v] = detail::elimination(D(t, t), D(t, j));
                D.combine_columns(t, j, s, tt, u, v);
                Q.combine_columns(t, j, s, tt, u, v);
            }
            for (std::size_t i = t + 1; i < r && !dirty; ++i)
                if (!is_zero(D(i, t))) dirty = true;
            if (dirty) continue;
            // Divisibility: fold a row with an entry the pivot does not divide.
            const T p = D(t, t);
            std::optional<std::size_t> bad;
            for (std::size_t i = t + 1; i < r && !bad; ++i)
                for (std::size_t j = t + 1; j < c; ++j)
                    if (!is_zero(D(i, j)) && !is_zero(T(D(i, j) - floor_div(D(i, j), p) * p))) {
                        bad = i;
                        break;
                    }
            if (!bad) break;
            D.sub_row_multiple(t, *bad, T(-1));
            P.sub_row_multiple(t, *bad, T(-1));
        }
        if (sign(D(t, t)) < 0) {
            D.negate_row(t);
            P.negate_row(t);
        }
        divisors.push_back(D(t, t));
    }
    return {std::move(divisors), std::move(P), std::move(D), std::move(Q)};
}

// Elementary divisors of A; empty for the zero matrix.
template <class T>
std::vector<T> snf(const Matrix<T>& A) {
    return snf_with_transforms(A).divisors;
}

// ---------------------------------------------------------------------------
// Determinant (Bareiss fraction-free elimination)

template <class T>
T det(const Matrix<T>& A) {
    if (!A.square()) throw std::invalid_argument("det: matrix is not square");
    const std::size_t n = A.rows();
    if (n == 0) return T(1);
    Matrix<T> M = A;
    T prev(1);
    int sgn_flip = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (is_zero(M(k, k))) {
            std::size_t piv = k + 1;
            while (piv < n && is_zero(M(piv, k))) ++piv;
            if (piv == n) return T(0);
            M.swap_rows(k, piv);
            sgn_flip = -sgn_flip;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                M(i, j) = exact_div(M(i, j) * M(k, k) - M(i, k) * M(k, j), prev);
        prev = M(k, k);
    }
    return sgn_flip < 0 ? T(-M(n - 1, n - 1)) : M(n - 1, n - 1);
}

inline Rational det(const RationalMatrix& A) {
    if (!A.square()) throw std::invalid_argument("det: matrix is not square");
    const std::size_t n = A.rows();
    RationalMatrix M = A;
    Rational d = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && sgn(M(piv, k)) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            M.swap_rows(k, piv);
            d = -d;
        }
        d *= M(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (sgn(M(i, k)) == 0) continue;
            const Rational f = M(i, k) / M(k, k);
            for (std::size_t j = k; j < n; ++j) M(i, j) -= f * M(k, j);
        }
    }
    return d;
}

// Adjugate of a square integer matrix, via cofactors computed with Bareiss.
inline ExactMatrix adjugate(const ExactMatrix& A) {
    const std::size_t n = A.rows();
    if (!A.square()) throw std::invalid_argument("adjugate: matrix is not square");
    ExactMatrix adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1;
        return adj;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ExactMatrix minor(n - 1, n - 1);
            for (std::size_t r = 0, mr = 0; r < n; ++r) {
                if (r == i) continue;
                for (std::size_t c = 0, mc = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(mr, mc++) = A(r, c);
                }
                ++mr;
            }
            Integer cof = det(minor);
            if ((i + j) % 2) cof = -cof;
            adj(j, i) = cof; // transpose of the cofactor matrix
        }
    return adj;
}

// ---------------------------------------------------------------------------
// Rational linear algebra

// Rank by exact Gaussian elimination.
inline std::size_t rank(RationalMatrix M) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < M.cols() && r < M.rows(); ++c) {
        std::size_t piv = r;
        while (piv < M.rows() && sgn(M(piv, c)) == 0) ++piv;
        if (piv == M.rows()) continue;
        M.swap_rows(r, piv);
        for (std::size_t i = r + 1; i < M.rows(); ++i) {
            if (sgn(M(i, c)) == 0) continue;
            const Rational f = M(i, c) / M(r, c);
            for (std::size_t j = c; j < M.cols(); ++j) M(i, j) -= f * M(r, j);
        }
        ++r;
    }
    return r;
}

struct SingularMatrixError : std::domain_error {
    SingularMatrixError() : std::domain_error("matrix is singular") {}
};

inline RationalMatrix inverse(const RationalMatrix& A) {
    if (!A.square()) throw std::invalid_argument("inverse: matrix is not square");
    const std::size_t n = A.rows();
    RationalMatrix M = A, I = RationalMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && sgn(M(piv, c)) == 0) ++piv;
        if (piv == n) throw SingularMatrixError();
        M.swap_rows(c, piv);
        I.swap_rows(c, piv);
        const Rational inv = 1 / M(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            M(c, j) *= inv;
            I(c, j) *= inv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || sgn(M(i, c)) == 0) continue;
            const Rational f = M(i, c);
            for (std::size_t j = 0; j < n; ++j) {
                M(i, j) -= f * M(c, j);
                I(i, j) -= f * I(c, j);
            }
        }
    }
    return I;
}

inline RatVector solve(const RationalMatrix& B, std::span<const Rational> v) {
    if (!B.square() || B.rows() != v.size()) throw std::invalid_argument("solve: shape mismatch");
    return inverse(B).apply(v);
}

// x with B·x = v when x is integral; std::nullopt (NotIntegral) otherwise.
// Throws SingularMatrixError when det B = 0.
inline std::optional<IntVector> solve_integral(const RationalMatrix& B, std::span<const Rational> v) {
    RatVector x = solve(B, v);
    IntVector out;
    out.reserve(x.size());
    for (const auto& q : x) {
        if (!is_integral(q)) return std::nullopt;
        out.push_back(q.get_num());
    }
    return out;
}

inline std::optional<IntVector> solve_integral(const ExactMatrix& B, std::span<const Integer> v) {
    RatVector rv(v.begin(), v.end());
    return solve_integral(to_rational(B), rv);
}

} // namespace latgen
