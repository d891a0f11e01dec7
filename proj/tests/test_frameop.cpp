// SPDX-License-Identifier: Apache-2.0
#include "test_util.hpp"

#include <asflab/frameop.hpp>
#include <asflab/pnorms.hpp>

#include <gtest/gtest.h>

using namespace asflab;
using namespace asflab::testing;

namespace {

const cplx I{0.0, 1.0};

FramePair delta_pair(std::int64_t L, std::int64_t dt, std::int64_t df) {
    const Grid g{L, 1.0};
    const auto d = GridVector::unit(g, 0);
    return FramePair(d, dt, df, d, dt, df);
}

struct Lattice {
    std::int64_t L, dt_s, df_s, dt_a, df_a;
};

// Includes mixed lattices with equal family size.
const Lattice lattices[] = {
    {2, 1, 1, 1, 1},  {2, 1, 2, 1, 2},  {8, 2, 2, 2, 2},  {12, 3, 2, 2, 3}, {12, 4, 3, 2, 6},
    {16, 2, 4, 4, 2}, {24, 4, 3, 3, 4}, {32, 4, 8, 8, 4}, {64, 8, 4, 4, 8}, {64, 2, 16, 16, 2},
};

} // namespace

TEST(Pairing, Examples) {
    const Grid g{16, 0.25};
    const auto chi = sample_indicator_window(1.0, g);
    EXPECT_NEAR(std::abs(pairing(chi, chi) - cplx(1.0)), 0.0, 1e-15);

    const Grid unit{4, 1.0};
    EXPECT_EQ(pairing(GridVector(unit, {1, 1, 0, 0}), GridVector(unit, {1, 1, 0, 0})), cplx(2.0));

    const Grid two{2, 1.0};
    EXPECT_EQ(pairing(GridVector(two, {I, 0}), GridVector(two, {I, 0})), cplx(-1.0));
}

TEST(Pairing, RejectsGridMismatch) {
    EXPECT_THROW(pairing(GridVector::zeros({4, 1.0}), GridVector::zeros({4, 0.5})), ModelMismatch);
}

TEST(Pairing, Holder) {
    for (double p : {1.5, 2.0, 3.0}) {
        const double q = conjugate_exponent(p);
        for (int trial = 0; trial < 200; ++trial) {
            const auto L = 1 + static_cast<std::int64_t>(rng()() % 40);
            const Grid g{L, uniform(0.01, 2.0)};
            const auto u = random_grid_vector(g);
            const auto w = random_grid_vector(g);
            EXPECT_LE(std::abs(pairing(u, w)), vector_pnorm(u, p) * vector_pnorm(w, q) * (1 + 1e-14));
        }
    }
}

TEST(FramePair, RejectsUnequalFamilies) {
    const Grid g{8, 1.0};
    const auto w = random_grid_vector(g);
    EXPECT_THROW(FramePair(w, 2, 2, w, 2, 4), DimensionError);
    EXPECT_THROW(FramePair(w, 2, 2, random_grid_vector({8, 0.5}), 2, 2), ModelMismatch);
}

TEST(AnalysisApply, CriticalDeltaIsBiorthogonal) {
    const auto pair = delta_pair(2, 1, 2);
    const auto x = pair.anal_family().window();
    const auto c = analysis_apply(pair, x);
    ASSERT_EQ(c.size(), 2);
    EXPECT_EQ(c.values[0], cplx(1.0));
    EXPECT_EQ(c.values[1], cplx(0.0));
}

TEST(AnalysisApply, ZeroAndLinearity) {
    const CyclicModel m(24, 0.5, 4, 3);
    const FramePair pair(m, random_grid_vector(m.grid()), random_grid_vector(m.grid()));
    EXPECT_EQ(analysis_apply(pair, GridVector::zeros(m.grid())).values.cwiseAbs().maxCoeff(), 0.0);
    const auto x = random_grid_vector(m.grid());
    const cplx lambda{0.3, -1.7};
    const auto scaled = analysis_apply(pair, GridVector(m.grid(), lambda * x.values()));
    EXPECT_LE((scaled.values - lambda * analysis_apply(pair, x).values).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(AnalysisApply, CoefficientsArePairingsWithAnalysisElements) {
    const CyclicModel m(24, 0.5, 4, 3, 3, 4);
    const FramePair pair(m, random_grid_vector(m.grid()), random_grid_vector(m.grid()));
    const auto x = random_grid_vector(m.grid());
    const auto c = analysis_apply(pair, x);
    for (std::int64_t k = 0; k < pair.family_size(); ++k)
        EXPECT_LE(std::abs(c.values[k] - pairing(x, pair.anal_family().element(k))), 1e-13);
}

TEST(SynthesisApply, BasisAction) {
    const CyclicModel m(12, 1.0, 3, 2);
    const FramePair pair(m, random_grid_vector(m.grid()), random_grid_vector(m.grid()));
    for (std::int64_t k = 0; k < pair.family_size(); ++k) {
        CoefficientSeq e{Vec::Zero(pair.family_size())};
        e.values[k] = 1.0;
        const auto got = synthesis_apply(pair, e);
        EXPECT_LE((got.values() - pair.synth_family().element(k).values()).cwiseAbs().maxCoeff(), 1e-14);
    }
    EXPECT_EQ(synthesis_apply(pair, {Vec::Zero(pair.family_size())}).values().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(synthesis_apply(pair, {Vec::Zero(pair.family_size() + 1)}), DimensionError);
}

TEST(FrameOperator, CriticalDeltaIsIdentity) {
    const auto pair = delta_pair(2, 1, 2);
    const auto y = frame_operator_apply(pair, GridVector({2, 1.0}, {3.0, 5.0 * I}));
    EXPECT_EQ(y[0], cplx(3.0));
    EXPECT_EQ(y[1], 5.0 * I);
    EXPECT_LE(max_abs(assemble_frame_matrix(pair) - Matrix::Identity(2, 2)), 0.0);
}

TEST(FrameOperator, RedundancyTwoDeltaIsTwiceIdentity) {
    const auto pair = delta_pair(2, 1, 1);
    const auto y = frame_operator_apply(pair, GridVector({2, 1.0}, {1.0, 1.0}));
    EXPECT_LE(std::abs(y[0] - 2.0), 1e-15);
    EXPECT_LE(std::abs(y[1] - 2.0), 1e-15);
    EXPECT_LE(max_abs(assemble_frame_matrix(pair) - 2.0 * Matrix::Identity(2, 2)), 1e-15);
}

TEST(FrameOperator, ZeroMapsToZero) {
    const CyclicModel m(16, 0.25, 2, 4);
    const auto pair = indicator_pair(m, 0.75, 0.75);
    EXPECT_EQ(frame_operator_apply(pair, GridVector::zeros(m.grid())).values().cwiseAbs().maxCoeff(), 0.0);
}

// Painless example: S = diag(G)/b with covering counts alternating 2, 1
// (intervals [0.5 n, 0.5 n + 0.75) cover even cells twice, odd cells once).
TEST(FrameOperator, PainlessIsCoveringMultiplication) {
    const GaborTriple t(0.5, 1, 0.75);
    const auto m = build_cyclic_model(t, t, 0.25, 4);
    const Matrix S = assemble_frame_matrix(indicator_pair(m, 0.75, 0.75));
    Matrix want = Matrix::Zero(16, 16);
    for (int j = 0; j < 16; ++j) want(j, j) = (j % 2 == 0) ? 2.0 : 1.0;
    EXPECT_LE(max_abs(S - want), 1e-12);
}

TEST(FrameOperator, DenseMatchesBruteForceSums) {
    for (const auto& lat : lattices) {
        const Grid g{lat.L, 4.0 / static_cast<double>(lat.L)};
        const FramePair pair(random_grid_vector(g), lat.dt_s, lat.df_s, random_grid_vector(g), lat.dt_a, lat.df_a);
        const Matrix S = assemble_frame_matrix(pair);
        const Matrix oracle = brute_force_frame_matrix(pair);
        EXPECT_LE(max_abs(S - oracle), 1e-12 * std::max(1.0, max_abs(oracle))) << "L=" << lat.L;
    }
}

TEST(FrameOperator, Factorization) {
    for (const auto& lat : lattices) {
        const Grid g{lat.L, 0.5};
        const FramePair pair(random_grid_vector(g), lat.dt_s, lat.df_s, random_grid_vector(g), lat.dt_a, lat.df_a);
        const Matrix S = assemble_frame_matrix(pair);
        const Matrix BA = synthesis_matrix(pair) * analysis_matrix(pair);
        EXPECT_LE(max_abs(S - BA), 1e-12 * std::max(1.0, max_abs(BA))) << "L=" << lat.L;
    }
}

TEST(FrameOperator, LinearityAndMatrixFreeAgreement) {
    for (const auto& lat : lattices) {
        const Grid g{lat.L, 0.25};
        const FramePair pair(random_grid_vector(g), lat.dt_s, lat.df_s, random_grid_vector(g), lat.dt_a, lat.df_a);
        const Matrix S = assemble_frame_matrix(pair);
        const double scale = std::max(1.0, max_abs(S));
        for (int trial = 0; trial < 5; ++trial) {
            const auto x = random_grid_vector(g);
            const auto y = random_grid_vector(g);
            const cplx alpha{uniform(-2, 2), uniform(-2, 2)}, beta{uniform(-2, 2), uniform(-2, 2)};
            const auto lhs = frame_operator_apply(pair, GridVector(g, alpha * x.values() + beta * y.values()));
            const Vec rhs =
                alpha * frame_operator_apply(pair, x).values() + beta * frame_operator_apply(pair, y).values();
            EXPECT_LE((lhs.values() - rhs).cwiseAbs().maxCoeff(), 1e-12 * scale * 4);
            EXPECT_LE((frame_operator_apply(pair, x).values() - S * x.values()).cwiseAbs().maxCoeff(), 1e-12 * scale);
            // composition identity
            const auto composed = synthesis_apply(pair, analysis_apply(pair, x));
            EXPECT_LE((composed.values() - S * x.values()).cwiseAbs().maxCoeff(), 1e-12 * scale);
        }
    }
}

TEST(FrameOperator, AdjointsMatchDenseAdjoints) {
    for (const auto& lat : lattices) {
        const Grid g{lat.L, 0.5};
        const FramePair pair(random_grid_vector(g), lat.dt_s, lat.df_s, random_grid_vector(g), lat.dt_a, lat.df_a);
        const Matrix S = assemble_frame_matrix(pair);
        const Matrix A = analysis_matrix(pair);
        const Matrix B = synthesis_matrix(pair);
        const Vec x = random_vec(lat.L);
        const Vec c = random_vec(pair.family_size());
        EXPECT_LE((frame_operator_adjoint_apply(pair, x) - S.adjoint() * x).cwiseAbs().maxCoeff(), 1e-11);
        EXPECT_LE((analysis_adjoint_apply(pair, c) - A.adjoint() * c).cwiseAbs().maxCoeff(), 1e-11);
        EXPECT_LE((synthesis_adjoint_apply(pair, x) - B.adjoint() * x).cwiseAbs().maxCoeff(), 1e-11);
    }
}

// delta window on the full lattice: S = redundancy * I = L * I (h = 1).
TEST(FrameOperator, DeltaRedundancyLaw) {
    for (std::int64_t L : {2, 4, 8}) {
        const auto pair = delta_pair(L, 1, 1);
        const double redundancy = pair.synth_family().redundancy();
        EXPECT_DOUBLE_EQ(redundancy, static_cast<double>(pair.family_size()) / static_cast<double>(L));
        EXPECT_LE(max_abs(assemble_frame_matrix(pair) - redundancy * Matrix::Identity(L, L)), 1e-13);
    }
}

TEST(FrameOperator, DenseCap) {
    const auto pair = delta_pair(8, 1, 1);
    EXPECT_THROW(assemble_frame_matrix(pair, 4), CapExceeded);
    EXPECT_NO_THROW(assemble_frame_matrix(pair, 8));
}
