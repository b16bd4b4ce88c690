#include "latgen/exactmat.hpp"
#include "latgen/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace latgen;

namespace {

ExactMatrix random_matrix(RngStream& rng, std::size_t r, std::size_t c, const Integer& bound) {
    ExactMatrix A(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) A(i, j) = rng.uniform_in(Integer(-bound), bound);
    return A;
}

// Lower column-echelon form: positive pivots, entries left of a pivot in [0, pivot).
void expect_hnf_shape(const HnfResult<Integer>& r) {
    const auto& H = r.H;
    for (std::size_t j = 0; j < r.rank; ++j) {
        const std::size_t p = r.pivot_rows[j];
        EXPECT_GT(H(p, j), 0);
        for (std::size_t i = 0; i < p; ++i) EXPECT_EQ(H(i, j), 0);
        if (j > 0) {
            EXPECT_GT(p, r.pivot_rows[j - 1]);
        }
        for (std::size_t l = 0; l < j; ++l) {
            EXPECT_GE(H(p, l), 0);
            EXPECT_LT(H(p, l), H(p, j));
        }
    }
    for (std::size_t j = r.rank; j < H.cols(); ++j)
        for (std::size_t i = 0; i < H.rows(); ++i) EXPECT_EQ(H(i, j), 0);
}

} // namespace

TEST(Det, SmallExamples) {
    EXPECT_EQ(det(ExactMatrix::identity(4)), 1);
    EXPECT_EQ(det(ExactMatrix{{2, 0}, {0, 3}}), 6);
    EXPECT_THROW(det(ExactMatrix(2, 3)), std::invalid_argument);
}

TEST(Det, AgreesWithCofactorExpansion) {
    RngStream rng(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 5;
        const ExactMatrix A = random_matrix(rng, n, n, Integer(10));
        EXPECT_EQ(det(A), oracle::cofactor_det(A));
    }
}

TEST(Det, CheckedArithmeticAgrees) {
    RngStream rng(12, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const ExactMatrix A = random_matrix(rng, 4, 4, Integer(1000));
        const auto A64 = A.map<Checked64>([](const Integer& x) { return from_integer<Checked64>(x); });
        EXPECT_EQ(to_integer(det(A64)), det(A));
    }
}

TEST(Hnf, ExamplesFromIdentityAndDiagonal) {
    const auto r = hnf(ExactMatrix::identity(3));
    EXPECT_EQ(r.H, ExactMatrix::identity(3));
    EXPECT_EQ(r.U, ExactMatrix::identity(3));
    EXPECT_EQ(hnf(ExactMatrix{{2, 0}, {0, 2}}).H, (ExactMatrix{{2, 0}, {0, 2}}));
    const auto w = hnf(ExactMatrix{{1, 0, 2}, {0, 1, 3}});
    EXPECT_EQ(w.H, (ExactMatrix{{1, 0, 0}, {0, 1, 0}}));
    EXPECT_EQ(w.rank, 2u);
}

TEST(Hnf, ZeroColumnsMoveRight) {
    const auto r = hnf(ExactMatrix{{0, 3, 0}, {0, 1, 2}});
    EXPECT_EQ(r.rank, 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(r.H(i, 2), 0);
    expect_hnf_shape(r);
}

TEST(Hnf, InvariantsOnRandomMatrices) {
    RngStream rng(13, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 4, m = 1 + (trial / 4) % 5;
        const ExactMatrix A = random_matrix(rng, n, m, trial % 2 ? Integer(5) : pow10(18));
        const auto r = hnf(A);
        EXPECT_EQ(A * r.U, r.H);
        EXPECT_EQ(abs(det(r.U)), 1);
        expect_hnf_shape(r);
        EXPECT_EQ(hnf(r.H).H, r.H) << "idempotence";
    }
}

TEST(Hnf, RankDeficientInput) {
    const ExactMatrix A{{1, 2, 3}, {2, 4, 6}, {1, 1, 1}};
    const auto r = hnf(A);
    EXPECT_EQ(r.rank, 2u);
    EXPECT_EQ(A * r.U, r.H);
    expect_hnf_shape(r);
}

TEST(Snf, Examples) {
    EXPECT_EQ(snf(ExactMatrix{{2, 0}, {0, 3}}), (IntVector{1, 6}));
    EXPECT_EQ(snf(ExactMatrix::identity(3)), (IntVector{1, 1, 1}));
    EXPECT_EQ(snf(ExactMatrix{{2, 0}, {0, 2}}), (IntVector{2, 2}));
    EXPECT_TRUE(snf(ExactMatrix(2, 2)).empty());
}

TEST(Snf, InvariantsOnRandomMatrices) {
    RngStream rng(14, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 4, m = 1 + (trial / 3) % 4;
        const ExactMatrix A = random_matrix(rng, n, m, trial % 3 ? Integer(6) : pow10(18));
        const auto s = snf_with_transforms(A);
        EXPECT_EQ(s.P * A * s.Q, s.D);
        EXPECT_EQ(abs(det(s.P)), 1);
        EXPECT_EQ(abs(det(s.Q)), 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (i != j || i >= s.divisors.size()) {
                    EXPECT_EQ(s.D(i, j), 0);
                }
        for (std::size_t i = 0; i < s.divisors.size(); ++i) {
            EXPECT_GT(s.divisors[i], 0);
            if (i + 1 < s.divisors.size()) {
                EXPECT_EQ(s.divisors[i + 1] % s.divisors[i], 0);
            }
        }
        if (n == m) {
            Integer prod = s.divisors.size() == n ? Integer(1) : Integer(0);
            for (const auto& d : s.divisors) prod *= d;
            EXPECT_EQ(abs(det(A)), prod);
        }
    }
}

TEST(Snf, FirstDivisorIsGcdOfEntries) {
    RngStream rng(15, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const ExactMatrix A = random_matrix(rng, 3, 3, Integer(12));
        Integer g = 0;
        for (const auto& x : A.entries()) g = gcd(g, x);
        const auto d = snf(A);
        if (g == 0) {
            EXPECT_TRUE(d.empty());
        } else {
            EXPECT_EQ(d.front(), g);
        }
    }
}

TEST(Unimodular, Examples) {
    EXPECT_TRUE(is_unimodular(ExactMatrix::identity(4)));
    EXPECT_FALSE(is_unimodular(ExactMatrix{{2, 0}, {0, 2}}));
    EXPECT_TRUE(is_unimodular(ExactMatrix{{1, 0, 2}, {0, 1, 3}}));
    EXPECT_FALSE(is_unimodular(ExactMatrix{{1, 0}, {0, 1}, {0, 0}}.transpose().transpose())); // 3x2
    EXPECT_TRUE(is_unimodular(ExactMatrix{{2, 3}}));
    EXPECT_FALSE(is_unimodular(ExactMatrix{{4, 6}}));
}

TEST(Unimodular, AgreesWithClosureOracle) {
    RngStream rng(16, 0);
    int positives = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        const std::size_t m = 3 + trial % 2;
        std::vector<std::array<int, 3>> cols(m);
        ExactMatrix A(3, m);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < 3; ++i) {
                cols[j][i] = static_cast<int>(rng.uniform_in(std::int64_t{-5}, std::int64_t{5}));
                A(i, j) = cols[j][i];
            }
        const bool expect = oracle::closure_generates_3(cols);
        positives += expect;
        EXPECT_EQ(is_unimodular(A), expect);
        EXPECT_EQ(is_unimodular_fast(A.map<Checked128>([](const Integer& x) { return from_integer<Checked128>(x); })),
                  expect);
    }
    EXPECT_GT(positives, 50);
}

TEST(Unimodular, InvariantUnderColumnPermutationAndSign) {
    RngStream rng(17, 0);
    for (int trial = 0; trial < 200; ++trial) {
        ExactMatrix A = random_matrix(rng, 3, 4, Integer(4));
        const bool u = is_unimodular(A);
        A.swap_columns(0, 3);
        A.negate_column(1);
        EXPECT_EQ(is_unimodular(A), u);
    }
}

TEST(Unimodular, FastPathFallsBackOnOverflow) {
    const Integer big = pow10(30);
    ExactMatrix A{{1, 0, 0}, {0, 1, 0}};
    A(0, 2) = big;
    A(1, 2) = big + 1;
    const auto A128 = A.map<Checked128>([](const Integer& x) { return from_integer<Checked128>(x); });
    EXPECT_TRUE(is_unimodular_fast(A128));
}

TEST(Solve, IntegralSolutions) {
    EXPECT_EQ(*solve_integral(ExactMatrix::identity(2), IntVector{3, 5}), (IntVector{3, 5}));
    const ExactMatrix D{{2, 0}, {0, 2}};
    EXPECT_EQ(*solve_integral(D, IntVector{2, 4}), (IntVector{1, 2}));
    EXPECT_FALSE(solve_integral(D, IntVector{1, 0}).has_value());
    EXPECT_THROW(solve_integral(ExactMatrix{{1, 2}, {2, 4}}, IntVector{1, 1}), SingularMatrixError);
}

TEST(Rational, InverseAndRank) {
    const RationalMatrix M{{Rational(1), Rational(1, 2)}, {Rational(0), Rational(3, 4)}};
    EXPECT_EQ(M * inverse(M), RationalMatrix::identity(2));
    EXPECT_EQ(rank(RationalMatrix{{Rational(1), Rational(2)}, {Rational(2), Rational(4)}}), 1u);
    EXPECT_THROW(inverse(RationalMatrix{{Rational(1), Rational(2)}, {Rational(2), Rational(4)}}), SingularMatrixError);
}

TEST(Adjugate, ProductIsDeterminantTimesIdentity) {
    RngStream rng(18, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const ExactMatrix A = random_matrix(rng, n, n, Integer(20));
        ExactMatrix expect = ExactMatrix::identity(n);
        const Integer d = det(A);
        for (std::size_t i = 0; i < n; ++i) expect(i, i) = d;
        EXPECT_EQ(A * adjugate(A), expect);
    }
}
