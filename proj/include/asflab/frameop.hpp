// SPDX-License-Identifier: Apache-2.0
#pragma once

//
// Duality pairing and the operator S x = sum_k [x, w_k] tau_k.
//
// The pairing is bilinear, [u, w] = h * sum_j u_j w_j, with no conjugation.
// Synthesis vectors tau_k come from a positively oriented Gabor family;
// analysis representers w_k from a negatively oriented one (see Orientation).
// With real windows and equal lattices, S reduces to the usual Gabor frame
// operator; in the painless case it is multiplication by G/b.
//
// Matrix-free application folds the L-point sum onto one aliasing period of
// the modulation (length M = L/df) per translate, so a single application
// costs O(L * (L/dt + M)) rather than O(L * K).
//

#include <asflab/operators.hpp>

#include <vector>

namespace asflab {

/// Default size limit for dense L x L assembly.
inline constexpr std::int64_t default_dense_cap = 4096;

/// h * sum_j u_j w_j (bilinear).
inline cplx pairing(const GridVector& u, const GridVector& w) {
    require_same_grid(u.grid(), w.grid());
    return u.grid().spacing * (u.values().array() * w.values().array()).sum();
}

/// Coefficients indexed in family order.
struct CoefficientSeq {
    Vec values;

    std::int64_t size() const { return values.size(); }
};

namespace detail {

inline std::vector<cplx> root_table(std::int64_t M) {
    std::vector<cplx> t(static_cast<std::size_t>(M));
    for (std::int64_t r = 0; r < M; ++r) t[static_cast<std::size_t>(r)] = unit_root(r, M);
    return t;
}

// c_k = scale * sum_j e_k[j] x_j, e_k = k-th element of the family generated by
// (window, dt, df, orientation).
inline Vec analyze(const Vec& x, const Vec& window, std::int64_t dt, std::int64_t df,
                   Orientation orientation, double scale) {
    const auto L = window.size();
    const auto M = L / df;
    const auto N = L / dt;
    const auto sign = static_cast<std::int64_t>(orientation);
    const auto roots = root_table(M);
    Vec c(M * N);
    Vec folded(M);
    for (std::int64_t n = 0; n < N; ++n) {
        folded.setZero();
        for (std::int64_t j = 0; j < L; ++j) {
            const cplx w = window[mod_floor(j - n * dt, L)];
            if (w != 0.0) folded[j % M] += x[j] * w;
        }
        for (std::int64_t m = 0; m < M; ++m) {
            cplx acc = 0.0;
            for (std::int64_t r = 0; r < M; ++r)
                acc += roots[static_cast<std::size_t>(mod_floor(sign * m * r, M))] * folded[r];
            c[n * M + m] = scale * acc;
        }
    }
    return c;
}

// out = scale * sum_k c_k e_k.
inline Vec synthesize(const Vec& c, const Vec& window, std::int64_t dt, std::int64_t df,
                      Orientation orientation, double scale) {
    const auto L = window.size();
    const auto M = L / df;
    const auto N = L / dt;
    const auto sign = static_cast<std::int64_t>(orientation);
    const auto roots = root_table(M);
    Vec out = Vec::Zero(L);
    Vec profile(M);
    for (std::int64_t n = 0; n < N; ++n) {
        for (std::int64_t r = 0; r < M; ++r) {
            cplx acc = 0.0;
            for (std::int64_t m = 0; m < M; ++m)
                acc += roots[static_cast<std::size_t>(mod_floor(sign * m * r, M))] * c[n * M + m];
            profile[r] = acc;
        }
        for (std::int64_t j = 0; j < L; ++j) {
            const cplx w = window[mod_floor(j - n * dt, L)];
            if (w != 0.0) out[j] += scale * w * profile[j % M];
        }
    }
    return out;
}

inline Orientation flipped(Orientation o) {
    return o == Orientation::Positive ? Orientation::Negative : Orientation::Positive;
}

} // namespace detail

/// Analysis functionals (represented through the pairing) and synthesis
/// vectors on one grid, paired one-to-one in family order.
class FramePair {
public:
    FramePair(const GridVector& synth_window, std::int64_t dt_synth, std::int64_t df_synth,
              const GridVector& anal_window, std::int64_t dt_anal, std::int64_t df_anal)
        : synth_(synth_window, dt_synth, df_synth, Orientation::Positive),
          anal_(anal_window, dt_anal, df_anal, Orientation::Negative) {
        require_same_grid(synth_window.grid(), anal_window.grid());
        if (synth_.size() != anal_.size())
            throw DimensionError("analysis family has " + std::to_string(anal_.size()) +
                                 " elements, synthesis family has " + std::to_string(synth_.size()));
    }

    /// Windows on a model; lattice steps taken from the model.
    FramePair(const CyclicModel& model, const GridVector& synth_window, const GridVector& anal_window)
        : FramePair(synth_window, model.dt_synth(), model.df_synth(), anal_window, model.dt_anal(),
                    model.df_anal()) {
        require_same_grid(model.grid(), synth_window.grid());
    }

    const GaborFamily& synth_family() const { return synth_; }
    const GaborFamily& anal_family() const { return anal_; }
    const Grid& grid() const { return synth_.grid(); }
    std::int64_t dim() const { return grid().size; }
    std::int64_t family_size() const { return synth_.size(); }

private:
    GaborFamily synth_;
    GaborFamily anal_;
};

/// Pair with indicator windows chi_[0,c) and chi_[0,rho) on a model.
inline FramePair indicator_pair(const CyclicModel& model, double c, double rho) {
    return FramePair(model, sample_indicator_window(c, model), sample_indicator_window(rho, model));
}

/// coefficient k = pairing(x, analysis element k).
inline CoefficientSeq analysis_apply(const FramePair& pair, const GridVector& x) {
    require_same_grid(pair.grid(), x.grid());
    const auto& fam = pair.anal_family();
    return {detail::analyze(x.values(), fam.window().values(), fam.dt(), fam.df(), fam.orientation(),
                            pair.grid().spacing)};
}

/// sum_k coeffs[k] * (synthesis element k).
inline GridVector synthesis_apply(const FramePair& pair, const CoefficientSeq& coeffs) {
    if (coeffs.size() != pair.family_size())
        throw DimensionError("coefficient length " + std::to_string(coeffs.size()) +
                             " does not match family size " + std::to_string(pair.family_size()));
    const auto& fam = pair.synth_family();
    return {pair.grid(), detail::synthesize(coeffs.values, fam.window().values(), fam.dt(), fam.df(),
                                            fam.orientation(), 1.0)};
}

/// S x, matrix-free.
inline GridVector frame_operator_apply(const FramePair& pair, const GridVector& x) {
    return synthesis_apply(pair, analysis_apply(pair, x));
}

/// Adjoint maps with respect to the unweighted sesquilinear product.
inline Vec analysis_adjoint_apply(const FramePair& pair, const Vec& coeffs) {
    const auto& fam = pair.anal_family();
    return detail::synthesize(coeffs, fam.window().values().conjugate(), fam.dt(), fam.df(),
                              detail::flipped(fam.orientation()), pair.grid().spacing);
}

inline Vec synthesis_adjoint_apply(const FramePair& pair, const Vec& x) {
    const auto& fam = pair.synth_family();
    return detail::analyze(x, fam.window().values().conjugate(), fam.dt(), fam.df(),
                           detail::flipped(fam.orientation()), 1.0);
}

/// S^H x (unweighted adjoint), matrix-free.
inline Vec frame_operator_adjoint_apply(const FramePair& pair, const Vec& x) {
    return analysis_adjoint_apply(pair, synthesis_adjoint_apply(pair, x));
}

/// L x K matrix whose columns are the synthesis elements.
inline Matrix synthesis_matrix(const FramePair& pair) {
    Matrix B(pair.dim(), pair.family_size());
    for (std::int64_t k = 0; k < pair.family_size(); ++k)
        B.col(k) = pair.synth_family().element(k).values();
    return B;
}

/// K x L matrix with rows h * (analysis element k).
inline Matrix analysis_matrix(const FramePair& pair) {
    Matrix A(pair.family_size(), pair.dim());
    for (std::int64_t k = 0; k < pair.family_size(); ++k)
        A.row(k) = pair.grid().spacing * pair.anal_family().element(k).values().transpose();
    return A;
}

/// Dense S; column j = S e_j.
inline Matrix assemble_frame_matrix(const FramePair& pair, std::int64_t dense_cap = default_dense_cap) {
    const auto L = pair.dim();
    if (L > dense_cap)
        throw CapExceeded("grid size " + std::to_string(L) + " exceeds dense cap " +
                          std::to_string(dense_cap));
    Matrix S(L, L);
    for (std::int64_t j = 0; j < L; ++j)
        S.col(j) = frame_operator_apply(pair, GridVector::unit(pair.grid(), j)).values();
    return S;
}

} // namespace asflab
