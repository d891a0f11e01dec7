// SPDX-License-Identifier: Apache-2.0
#pragma once

//
// Vector p-norms, duality maps, and p -> p operator norm estimation.
//
// The operator norm estimator is the Boyd/Higham power method: starting from
// x with |x|_p = 1, take y = A x, pull the dual of y back through A^H, and map
// the result to its q-side dual. Each step does not decrease |A x|_p / |x|_p,
// so every returned value is attained by its witness and is a lower bound on
// the true norm. For p = 2 it reduces to the power method on A^H A.
//
// Estimator norms are unweighted. For the operators handled here the grid
// weight h^{1/p} is uniform and cancels between numerator and denominator, so
// the weighted and unweighted p -> p norms coincide.
//

#include <asflab/model.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace asflab {

/// (sum_j |x_j|^p)^{1/p}, computed with max-scaling.
inline double pnorm_unweighted(const Vec& x, double p) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) s = std::max(s, std::abs(x[j]));
    if (s == 0.0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) acc += std::pow(std::abs(x[j]) / s, p);
    return s * std::pow(acc, 1.0 / p);
}

/// (h sum_j |x_j|^p)^{1/p}.
inline double vector_pnorm(const GridVector& x, double p) {
    conjugate_exponent(p);
    return std::pow(x.grid().spacing, 1.0 / p) * pnorm_unweighted(x.values(), p);
}

/// y with y_j = conj(sign x_j) |x_j|^{p-1} / |x|_p^{p-1}: sum_j y_j x_j = |x|_p
/// and |y|_q = 1 (unweighted). At p = 2 this is conj(x) / |x|_2.
inline Vec dual_vector(const Vec& x, double p) {
    conjugate_exponent(p);
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) s = std::max(s, std::abs(x[j]));
    if (s == 0.0) throw DomainError("dual vector of the zero vector");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) acc += std::pow(std::abs(x[j]) / s, p);
    const double denom = std::pow(acc, (p - 1.0) / p);
    Vec y(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double a = std::abs(x[j]);
        y[j] = a == 0.0 ? cplx{0.0, 0.0} : std::conj(x[j] / a) * (std::pow(a / s, p - 1.0) / denom);
    }
    return y;
}

inline GridVector dual_vector(const GridVector& x, double p) {
    return {x.grid(), dual_vector(x.values(), p)};
}

struct EstimatorOptions {
    /// Random complex starts in addition to the all-ones vector.
    int random_starts = 4;
    double tol = 1e-10;
    int max_iter = 1000;
    std::uint64_t seed = 20210607;
    /// Extra caller-supplied start vectors, tried after the built-in ones.
    std::vector<Vec> extra_starts;
};

struct NormEstimate {
    double value = 0.0;
    /// Attains value = |A witness|_p / |witness|_p.
    Vec witness;
    int iterations = 0;
    bool converged = false;
};

using LinearMap = std::function<Vec(const Vec&)>;

/// Deterministic complex start vectors: all-ones, then uniform in the unit square.
inline std::vector<Vec> estimator_starts(std::int64_t dim, const EstimatorOptions& opts) {
    std::vector<Vec> starts;
    starts.emplace_back(Vec::Ones(dim));
    std::mt19937_64 rng(opts.seed);
    // Portable uniform in [-1, 1): top 53 bits of the engine output.
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; };
    for (int r = 0; r < opts.random_starts; ++r) {
        Vec v(dim);
        for (std::int64_t j = 0; j < dim; ++j) {
            const double re = uniform();
            const double im = uniform();
            v[j] = {re, im};
        }
        starts.push_back(std::move(v));
    }
    for (const auto& v : opts.extra_starts)
        if (v.size() == dim) starts.push_back(v);
    return starts;
}

namespace detail {

inline NormEstimate power_run(const LinearMap& apply, const LinearMap& adjoint, Vec x, double p,
                              double q, const EstimatorOptions& opts) {
    NormEstimate est;
    const double x0 = pnorm_unweighted(x, p);
    if (x0 == 0.0) return est;
    x /= x0;
    double prev = -1.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        est.iterations = it + 1;
        const Vec y = apply(x);
        const double value = pnorm_unweighted(y, p) / pnorm_unweighted(x, p);
        if (value > est.value || est.witness.size() == 0) {
            est.value = value;
            est.witness = x;
        }
        if (value == 0.0) {
            est.converged = true;
            break;
        }
        if (prev >= 0.0 && std::abs(value - prev) <= opts.tol * value) {
            est.converged = true;
            break;
        }
        prev = value;
        const Vec z = adjoint(dual_vector(y, p).conjugate());
        const double zq = pnorm_unweighted(z, q);
        if (zq == 0.0 || zq <= x.dot(z).real()) {
            // Stationary: no ascent direction left.
            est.converged = true;
            break;
        }
        x = dual_vector(z, q).conjugate();
    }
    return est;
}

} // namespace detail

/// Lower-bound estimate of |A|_{p->p}. `adjoint` must be A^H with respect to the
/// unweighted sesquilinear product; `dim` is the input dimension.
inline NormEstimate opnorm_estimate(const LinearMap& apply, const LinearMap& adjoint, std::int64_t dim,
                                    double p, const EstimatorOptions& opts = {}) {
    const double q = conjugate_exponent(p);
    NormEstimate best;
    bool all_converged = true;
    int iterations = 0;
    for (const auto& start : estimator_starts(dim, opts)) {
        auto run = detail::power_run(apply, adjoint, start, p, q, opts);
        iterations += run.iterations;
        all_converged = all_converged && run.converged;
        if (run.value > best.value || best.witness.size() == 0) best = std::move(run);
    }
    best.iterations = iterations;
    best.converged = all_converged;
    return best;
}

/// e_j for the column of A with the largest p-norm.
inline Vec max_column_start(const Matrix& A, double p) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const double n = pnorm_unweighted(A.col(j), p);
        if (n > best_norm) {
            best_norm = n;
            best = j;
        }
    }
    Vec e = Vec::Zero(A.cols());
    if (A.cols() > 0) e[best] = 1.0;
    return e;
}

namespace detail {

// |A|_p = |A^H|_q. Each run on the adjoint problem yields a witness z, which
// maps to x = conj(dual(A^H z)) with |A x|_p / |x|_p >= |A^H z|_q / |z|_q.
// One start per adjoint run keeps the start set nested as random_starts grows.
inline std::vector<Vec> dual_side_starts(const LinearMap& apply, const LinearMap& adjoint, std::int64_t rows,
                                         double p, const Vec& adjoint_column_start, EstimatorOptions opts) {
    const double q = conjugate_exponent(p);
    opts.extra_starts = {adjoint_column_start};
    std::vector<Vec> out;
    for (const auto& start : estimator_starts(rows, opts)) {
        const auto run = power_run(adjoint, apply, start, q, p, opts);
        if (run.value == 0.0 || run.witness.size() == 0) continue;
        out.push_back(dual_vector(Vec(adjoint(run.witness)), q).conjugate());
    }
    return out;
}

inline NormEstimate dense_estimate(const LinearMap& apply, const LinearMap& adjoint, std::int64_t rows,
                                   std::int64_t cols, double p, const Vec& column_start,
                                   const Vec& adjoint_column_start, const EstimatorOptions& opts) {
    auto more = opts;
    more.extra_starts.push_back(column_start);
    for (auto& x : dual_side_starts(apply, adjoint, rows, p, adjoint_column_start, opts))
        more.extra_starts.push_back(std::move(x));
    return opnorm_estimate(apply, adjoint, cols, p, more);
}

} // namespace detail

/// Dense overload. Besides the standard starts it tries the max-column unit
/// vector (exact for diagonal matrices) and a start carried over from the
/// adjoint problem, so |A|_p and |A^H|_q estimates agree closely.
inline NormEstimate opnorm_estimate(const Matrix& A, double p, const EstimatorOptions& opts = {}) {
    return detail::dense_estimate([&A](const Vec& x) -> Vec { return A * x; },
                                  [&A](const Vec& x) -> Vec { return A.adjoint() * x; }, A.rows(), A.cols(), p,
                                  max_column_start(A, p), max_column_start(A.adjoint(), conjugate_exponent(p)),
                                  opts);
}

/// Relative pivot cutoff below which a factorization is declared singular.
inline constexpr double singular_pivot_tol = 1e-13;

/// Partial-pivot LU with a singularity verdict.
class LuFactor {
public:
    explicit LuFactor(const Matrix& A, double pivot_tol = singular_pivot_tol) : lu_(A) {
        if (A.rows() != A.cols()) throw DimensionError("LU needs a square matrix");
        const double scale = A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
        const double min_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
        singular_ = scale == 0.0 || min_pivot < pivot_tol * scale;
    }

    bool singular() const { return singular_; }
    Vec solve(const Vec& b) const { return lu_.solve(b); }
    Vec solve_adjoint(const Vec& b) const { return lu_.adjoint().solve(b); }
    Matrix inverse() const { return lu_.inverse(); }

private:
    Eigen::PartialPivLU<Matrix> lu_;
    bool singular_;
};

/// Estimate of |A^{-1}|_{p->p}; value = +inf (converged) when A is numerically singular.
inline NormEstimate inverse_opnorm_estimate(const Matrix& A, double p, const EstimatorOptions& opts = {}) {
    if (A.rows() != A.cols()) throw DimensionError("inverse norm needs a square matrix");
    const LuFactor lu(A);
    if (lu.singular()) {
        NormEstimate est;
        est.value = std::numeric_limits<double>::infinity();
        est.converged = true;
        return est;
    }
    const Matrix inv = lu.inverse();
    return detail::dense_estimate([&lu](const Vec& x) { return lu.solve(x); },
                                  [&lu](const Vec& x) { return lu.solve_adjoint(x); }, A.rows(), A.cols(), p,
                                  max_column_start(inv, p), max_column_start(inv.adjoint(), conjugate_exponent(p)),
                                  opts);
}

/// Conjugate gradients on the normal equations (A^H A x = A^H b). Returns
/// false when the relative residual does not reach tol within max_iter.
inline bool cgnr_solve(const LinearMap& apply, const LinearMap& adjoint, const Vec& b, Vec& x,
                       double tol = 1e-13, int max_iter = 0) {
    const auto n = b.size();
    if (max_iter <= 0) max_iter = static_cast<int>(std::max<Eigen::Index>(50, 4 * n));
    x = Vec::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) return true;
    Vec r = b;
    Vec z = adjoint(r);
    Vec d = z;
    double zz = z.squaredNorm();
    for (int it = 0; it < max_iter; ++it) {
        const Vec w = apply(d);
        const double ww = w.squaredNorm();
        if (ww == 0.0) return false;
        const double alpha = zz / ww;
        x += alpha * d;
        r -= alpha * w;
        if (r.norm() <= tol * bnorm) return true;
        z = adjoint(r);
        const double zz_new = z.squaredNorm();
        if (zz_new == 0.0) return false;
        d = z + (zz_new / zz) * d;
        zz = zz_new;
    }
    return false;
}

/// Matrix-free variant: inverse applied through CGNR. Unsolved systems mark the
/// estimate as not converged.
inline NormEstimate inverse_opnorm_estimate(const LinearMap& apply, const LinearMap& adjoint,
                                            std::int64_t dim, double p, const EstimatorOptions& opts = {}) {
    bool solve_failed = false;
    auto inv = [&](const Vec& b) {
        Vec x;
        if (!cgnr_solve(apply, adjoint, b, x)) solve_failed = true;
        return x;
    };
    auto inv_adj = [&](const Vec& b) {
        Vec x;
        if (!cgnr_solve(adjoint, apply, b, x)) solve_failed = true;
        return x;
    };
    auto est = opnorm_estimate(inv, inv_adj, dim, p, opts);
    if (solve_failed) est.converged = false;
    return est;
}

/// Smallest and largest singular values. For self-adjoint positive S these are
/// the p = 2 frame bounds.
inline FrameBounds exact_p2_extremes(const Matrix& A, std::int64_t dense_cap = 4096) {
    if (A.rows() > dense_cap || A.cols() > dense_cap)
        throw CapExceeded("matrix exceeds dense cap " + std::to_string(dense_cap));
    if (A.size() == 0) throw DimensionError("empty matrix");
    Eigen::BDCSVD<Matrix> svd(A);
    const auto& s = svd.singularValues();
    return {s.minCoeff(), s.maxCoeff()};
}

} // namespace asflab
