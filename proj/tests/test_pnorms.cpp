// SPDX-License-Identifier: Apache-2.0
#include "test_util.hpp"

#include <asflab/pnorms.hpp>

#include <gtest/gtest.h>

using namespace asflab;
using namespace asflab::testing;

namespace {

double svd_top(const Matrix& A) { return Eigen::JacobiSVD<Matrix>(A).singularValues()(0); }

double witness_ratio(const Matrix& A, const NormEstimate& e, double p) {
    return pnorm_unweighted(A * e.witness, p) / pnorm_unweighted(e.witness, p);
}

Matrix diag(std::initializer_list<cplx> d) {
    Vec v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (auto x : d) v[i++] = x;
    return v.asDiagonal();
}

} // namespace

TEST(VectorPnorm, Examples) {
    EXPECT_DOUBLE_EQ(vector_pnorm(GridVector({2, 1.0}, {3, 4}), 2.0), 5.0);
    EXPECT_NEAR(vector_pnorm(GridVector({4, 1.0}, {1, 1, 1, 1}), 4.0), std::sqrt(2.0), 1e-15);
    for (double p : {1.2, 2.0, 3.5}) {
        const Grid g{16, 0.25};
        EXPECT_NEAR(vector_pnorm(sample_indicator_window(0.75, g), p), std::pow(0.75, 1.0 / p), 1e-15);
    }
}

TEST(VectorPnorm, ZeroIffZeroAndDomain) {
    const Grid g{5, 0.3};
    EXPECT_EQ(vector_pnorm(GridVector::zeros(g), 2.5), 0.0);
    EXPECT_GT(vector_pnorm(GridVector::unit(g, 3), 2.5), 0.0);
    EXPECT_THROW(vector_pnorm(GridVector::zeros(g), 1.0), DomainError);
}

TEST(VectorPnorm, HugeAndTinyEntriesDoNotOverflow) {
    Vec x(2);
    x << 1e200, 1e200;
    EXPECT_NEAR(pnorm_unweighted(x, 3.0) / 1e200, std::cbrt(2.0), 1e-15);
    x << 1e-200, 0.0;
    EXPECT_NEAR(pnorm_unweighted(x, 8.0) / 1e-200, 1.0, 1e-15);
}

TEST(DualVector, Examples) {
    Vec x(2);
    x << 1.0, 0.0;
    EXPECT_LE((dual_vector(x, 2.0) - x).cwiseAbs().maxCoeff(), 0.0);
    x << 1.0, 1.0;
    EXPECT_LE((dual_vector(x, 2.0) - x / std::sqrt(2.0)).cwiseAbs().maxCoeff(), 1e-16);
    Vec y(3);
    y << 2.0, 0.0, 0.0;
    Vec e(3);
    e << 1.0, 0.0, 0.0;
    for (double p : {1.3, 2.0, 5.0}) EXPECT_LE((dual_vector(y, p) - e).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(dual_vector(Vec::Zero(3), 2.0), DomainError);
}

TEST(DualVector, NormingProperties) {
    for (double p : {1.2, 1.5, 2.0, 3.0, 8.0}) {
        const double q = conjugate_exponent(p);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec x = random_vec(9);
            const Vec y = dual_vector(x, p);
            const cplx s = (y.array() * x.array()).sum();
            EXPECT_NEAR(s.real(), pnorm_unweighted(x, p), 1e-13);
            EXPECT_NEAR(s.imag(), 0.0, 1e-13);
            EXPECT_NEAR(pnorm_unweighted(y, q), 1.0, 1e-13);
            if (p == 2.0) {
                EXPECT_LE((y - x.conjugate() / x.norm()).cwiseAbs().maxCoeff(), 1e-15);
            }
        }
    }
}

TEST(OpnormEstimate, DiagonalAndIdentity) {
    for (double p : {1.2, 1.5, 2.0, 3.0, 8.0}) {
        const auto d = opnorm_estimate(diag({1.0, 3.0}), p);
        EXPECT_NEAR(d.value, 3.0, 3e-10) << p;
        EXPECT_TRUE(d.converged);
        EXPECT_NEAR(opnorm_estimate(Matrix::Identity(5, 5), p).value, 1.0, 1e-14) << p;
    }
}

TEST(OpnormEstimate, RandomDiagonalExact) {
    for (double p : {1.2, 1.5, 2.0, 3.0, 8.0}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto n = 2 + static_cast<std::int64_t>(rng()() % 7);
            Vec d(n);
            for (std::int64_t i = 0; i < n; ++i) d[i] = std::polar(uniform(0.1, 10.0), uniform(0, 6.28));
            const Matrix D = d.asDiagonal();
            const auto est = opnorm_estimate(D, p);
            const double want = d.cwiseAbs().maxCoeff();
            EXPECT_LE(std::abs(est.value - want), 1e-10 * want) << "p=" << p;
            EXPECT_LE(rel_err(witness_ratio(D, est, p), est.value), 1e-10);
        }
    }
}

TEST(OpnormEstimate, MatchesSvdAtTwo) {
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = (trial < 10) ? 5 : 8;
        const Matrix A = random_matrix(n);
        const auto est = opnorm_estimate(A, 2.0);
        EXPECT_LE(rel_err(est.value, svd_top(A)), 1e-8) << "trial " << trial;
        EXPECT_LE(rel_err(witness_ratio(A, est, 2.0), est.value), 1e-10);
    }
}

TEST(OpnormEstimate, WitnessAttainsValue) {
    for (double p : {1.2, 1.5, 3.0, 8.0}) {
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix A = random_matrix(7);
            const auto est = opnorm_estimate(A, p);
            EXPECT_LE(rel_err(witness_ratio(A, est, p), est.value), 1e-10);
            EXPECT_GT(est.iterations, 0);
        }
    }
}

// |A|_{p->p} = |A^H|_{q->q}; both sides are estimates.
TEST(OpnormEstimate, DualityAcrossConjugateExponents) {
    for (double p : {1.5, 3.0}) {
        const double q = conjugate_exponent(p);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix A = random_matrix(6);
            const double lhs = opnorm_estimate(A, p).value;
            const double rhs = opnorm_estimate(Matrix(A.adjoint()), q).value;
            EXPECT_LE(std::abs(lhs - rhs), 0.01 * std::max(lhs, rhs)) << "p=" << p << " trial " << trial;
        }
    }
}

TEST(OpnormEstimate, MoreRestartsNeverDecrease) {
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A = random_matrix(6);
        double prev = 0.0;
        for (int starts = 0; starts <= 8; ++starts) {
            EstimatorOptions opts;
            opts.random_starts = starts;
            const double v = opnorm_estimate(A, 1.3, opts).value;
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(OpnormEstimate, DeterministicForSeed) {
    const Matrix A = random_matrix(6);
    const auto e1 = opnorm_estimate(A, 3.0);
    const auto e2 = opnorm_estimate(A, 3.0);
    EXPECT_EQ(e1.value, e2.value);
    EXPECT_EQ(e1.witness, e2.witness);
}

TEST(OpnormEstimate, RectangularOperator) {
    Matrix A = random_matrix(6).topRows(3);
    const auto est = opnorm_estimate([&](const Vec& x) -> Vec { return A * x; },
                                     [&](const Vec& y) -> Vec { return A.adjoint() * y; }, 6, 2.0);
    EXPECT_LE(rel_err(est.value, svd_top(A)), 1e-8);
}

TEST(InverseOpnorm, Examples) {
    for (double p : {1.2, 2.0, 5.0}) {
        EXPECT_NEAR(inverse_opnorm_estimate(2.0 * Matrix::Identity(4, 4), p).value, 0.5, 1e-14);
        EXPECT_NEAR(inverse_opnorm_estimate(diag({1.0, 2.0}), p).value, 1.0, 1e-12);
    }
}

TEST(InverseOpnorm, RankDeficientGaborIsSingular) {
    // 2 family vectors in dimension 4
    const Grid g{4, 1.0};
    const auto w = random_grid_vector(g);
    Matrix S = Matrix::Zero(4, 4);
    const auto fam = GaborFamily(w, 2, 4);
    for (std::int64_t k = 0; k < fam.size(); ++k) S += fam.element(k).values() * fam.element(k).values().transpose();
    const auto est = inverse_opnorm_estimate(S, 1.5);
    EXPECT_TRUE(std::isinf(est.value));
    EXPECT_TRUE(est.converged);
    EXPECT_TRUE(std::isinf(inverse_opnorm_estimate(Matrix::Zero(3, 3), 2.0).value));
}

TEST(InverseOpnorm, MatchesSmallestSingularValueAtTwo) {
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix A = random_matrix(6);
        const double smin = Eigen::JacobiSVD<Matrix>(A).singularValues()(5);
        EXPECT_LE(rel_err(inverse_opnorm_estimate(A, 2.0).value, 1.0 / smin), 1e-8);
    }
}

TEST(InverseOpnorm, MatrixFreeAgreesWithLu) {
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix A = random_matrix(6) + 3.0 * Matrix::Identity(6, 6);
        const auto dense = inverse_opnorm_estimate(A, 1.5);
        const auto free = inverse_opnorm_estimate([&](const Vec& x) -> Vec { return A * x; },
                                                  [&](const Vec& x) -> Vec { return A.adjoint() * x; }, 6, 1.5);
        EXPECT_TRUE(free.converged);
        EXPECT_LE(rel_err(free.value, dense.value), 1e-9);
    }
}

TEST(CgnrSolve, ReportsFailureOnSingularSystems) {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = 1.0;
    Vec b = Vec::Ones(3);
    Vec x;
    EXPECT_FALSE(cgnr_solve([&](const Vec& v) -> Vec { return A * v; },
                            [&](const Vec& v) -> Vec { return A.adjoint() * v; }, b, x));
}

TEST(ExactP2Extremes, Examples) {
    const auto id = exact_p2_extremes(Matrix::Identity(3, 3));
    EXPECT_NEAR(id.lower, 1.0, 1e-15);
    EXPECT_NEAR(id.upper, 1.0, 1e-15);
    Matrix G = Matrix::Zero(16, 16);
    for (int j = 0; j < 16; ++j) G(j, j) = (j % 2 == 0) ? 2.0 : 1.0;
    const auto pg = exact_p2_extremes(G);
    EXPECT_NEAR(pg.lower, 1.0, 1e-14);
    EXPECT_NEAR(pg.upper, 2.0, 1e-14);
    const auto two = exact_p2_extremes(2.0 * Matrix::Identity(2, 2));
    EXPECT_NEAR(two.lower, 2.0, 1e-15);
    EXPECT_NEAR(two.upper, 2.0, 1e-15);
    EXPECT_THROW(exact_p2_extremes(Matrix::Identity(8, 8), 4), CapExceeded);
}
