// SPDX-License-Identifier: Apache-2.0
#pragma once

//
// Domain parameters and the finite cyclic model.
//
// A CyclicModel is a periodized grid of L points with spacing h (period L*h)
// on which both Gabor lattices land exactly: translation steps are integer
// multiples of h and modulation steps are integer multiples of 1/period.
// Parameters that do not land on the grid are rejected, never rounded.
//

#include <asflab/error.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>

namespace asflab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Integrality tolerance for decimal inputs (config files carry decimals).
inline constexpr double integrality_tol = 1e-9;

/// Returns the nearest integer when x is integral within integrality_tol
/// (relative to max(1, |x|)), std::nullopt otherwise.
inline std::optional<std::int64_t> as_integer(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    const double r = std::round(x);
    if (std::abs(x - r) > integrality_tol * std::max(1.0, std::abs(x))) return std::nullopt;
    return static_cast<std::int64_t>(r);
}

/// q = p/(p-1) for 1 < p < inf.
inline double conjugate_exponent(double p) {
    if (!std::isfinite(p) || !(p > 1.0))
        throw DomainError("exponent p must satisfy 1 < p < inf, got " + std::to_string(p));
    return p / (p - 1.0);
}

/// Lebesgue exponent p in (1, inf) together with its conjugate.
class LebesgueExponent {
public:
    explicit LebesgueExponent(double p) : p_(p), q_(conjugate_exponent(p)) {}

    double p() const { return p_; }
    double q() const { return q_; }
    LebesgueExponent conjugate() const { return LebesgueExponent(q_); }

private:
    double p_;
    double q_;
};

/// (translation step, modulation step, window length). One instance holds the
/// synthesis triple (a, b, c), another the analysis triple (alpha, beta, rho).
struct GaborTriple {
    double shift;
    double mod_step;
    double win_len;

    GaborTriple(double shift_, double mod_step_, double win_len_)
        : shift(shift_), mod_step(mod_step_), win_len(win_len_) {
        if (!(shift > 0) || !(mod_step > 0) || !(win_len > 0) || !std::isfinite(shift) ||
            !std::isfinite(mod_step) || !std::isfinite(win_len))
            throw DomainError("Gabor triple entries must be finite and strictly positive");
    }

    friend bool operator==(const GaborTriple&, const GaborTriple&) = default;
};

/// Grid geometry shared by all vectors on a model: size and spacing.
struct Grid {
    std::int64_t size;
    double spacing;

    double period() const { return static_cast<double>(size) * spacing; }
    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Finite realization: L points, spacing h, integer lattice steps for the
/// synthesis and analysis families. Immutable.
class CyclicModel {
public:
    /// Direct construction from integer steps (the discrete (MN,PQ) setting).
    /// Throws IncommensurateParameters if a step does not divide L.
    CyclicModel(std::int64_t L, double h, std::int64_t dt_synth, std::int64_t df_synth,
                std::int64_t dt_anal, std::int64_t df_anal)
        : L_(L), h_(h), dt_s_(dt_synth), df_s_(df_synth), dt_a_(dt_anal), df_a_(df_anal) {
        if (L_ < 1) throw DomainError("grid size must be positive");
        if (!(h_ > 0) || !std::isfinite(h_)) throw DomainError("grid spacing must be positive");
        check_divides(dt_s_, "synthesis translation step");
        check_divides(df_s_, "synthesis modulation step");
        check_divides(dt_a_, "analysis translation step");
        check_divides(df_a_, "analysis modulation step");
    }

    /// Same lattice on both sides.
    CyclicModel(std::int64_t L, double h, std::int64_t dt, std::int64_t df)
        : CyclicModel(L, h, dt, df, dt, df) {}

    std::int64_t size() const { return L_; }
    double spacing() const { return h_; }
    double period() const { return static_cast<double>(L_) * h_; }
    Grid grid() const { return {L_, h_}; }

    std::int64_t dt_synth() const { return dt_s_; }
    std::int64_t df_synth() const { return df_s_; }
    std::int64_t dt_anal() const { return dt_a_; }
    std::int64_t df_anal() const { return df_a_; }

    /// Number of distinct modulations (one aliasing period) and translations.
    std::int64_t mod_count_synth() const { return L_ / df_s_; }
    std::int64_t shift_count_synth() const { return L_ / dt_s_; }
    std::int64_t mod_count_anal() const { return L_ / df_a_; }
    std::int64_t shift_count_anal() const { return L_ / dt_a_; }

    friend bool operator==(const CyclicModel&, const CyclicModel&) = default;

private:
    void check_divides(std::int64_t step, const char* what) const {
        if (step < 1)
            throw IncommensurateParameters(std::string(what) + " must be a positive integer");
        if (L_ % step != 0)
            throw IncommensurateParameters(std::string(what) + " " + std::to_string(step) +
                                           " does not divide grid size " + std::to_string(L_));
    }

    std::int64_t L_;
    double h_;
    std::int64_t dt_s_, df_s_, dt_a_, df_a_;
};

/// Maps continuous (abc, alpha beta rho) parameters onto an exact cyclic model
/// with spacing h and period Lambda. Window lengths are not checked here.
inline CyclicModel build_cyclic_model(const GaborTriple& synth, const GaborTriple& anal, double h,
                                      double period) {
    if (!(h > 0) || !std::isfinite(h)) throw DomainError("grid spacing must be positive");
    if (!(period > 0) || !std::isfinite(period)) throw DomainError("period must be positive");

    auto integral = [](double x, const std::string& what) {
        auto n = as_integer(x);
        if (!n || *n < 1)
            throw IncommensurateParameters(what + " = " + std::to_string(x) +
                                           " is not a positive integer");
        return *n;
    };
    const auto L = integral(period / h, "period/grid_res");
    const auto dt_s = integral(synth.shift / h, "a/grid_res");
    const auto df_s = integral(synth.mod_step * period, "b*period");
    const auto dt_a = integral(anal.shift / h, "alpha/grid_res");
    const auto df_a = integral(anal.mod_step * period, "beta*period");
    return CyclicModel(L, h, dt_s, df_s, dt_a, df_a);
}

/// Complex samples on a grid. Norms and pairings carry the Riemann weight h.
class GridVector {
public:
    GridVector(Grid grid, Vec values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size)
            throw DimensionError("vector length " + std::to_string(values_.size()) +
                                 " does not match grid size " + std::to_string(grid_.size));
    }

    GridVector(Grid grid, std::initializer_list<cplx> values)
        : GridVector(grid, Vec::Map(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

    static GridVector zeros(Grid grid) { return {grid, Vec::Zero(grid.size)}; }

    /// e_j on the grid.
    static GridVector unit(Grid grid, std::int64_t j) {
        Vec v = Vec::Zero(grid.size);
        v[j] = 1.0;
        return {grid, std::move(v)};
    }

    const Grid& grid() const { return grid_; }
    std::int64_t size() const { return grid_.size; }
    const Vec& values() const { return values_; }
    cplx operator[](std::int64_t j) const { return values_[j]; }

    GridVector conj() const { return {grid_, values_.conjugate()}; }

private:
    Grid grid_;
    Vec values_;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b))
        throw ModelMismatch("grid mismatch: (" + std::to_string(a.size) + ", " +
                            std::to_string(a.spacing) + ") vs (" + std::to_string(b.size) + ", " +
                            std::to_string(b.spacing) + ")");
}

/// Frame-type constants lower <= upper.
struct FrameBounds {
    double lower;
    double upper;

    FrameBounds(double lower_, double upper_) : lower(lower_), upper(upper_) {
        if (!(lower >= 0) || !(upper >= lower)) throw DomainError("frame bounds need 0 <= lower <= upper");
    }
};

/// chi_[0,c) sampled on the grid (half-open: index j included iff j*h < c).
inline GridVector sample_indicator_window(double c, const Grid& grid) {
    if (!(c > 0) || !std::isfinite(c)) throw DomainError("window length must be positive");
    auto cells = as_integer(c / grid.spacing);
    if (!cells) throw IncommensurateParameters("window length/grid_res = " + std::to_string(c / grid.spacing) +
                                               " is not an integer");
    if (*cells > grid.size) throw DomainError("window length exceeds the period");
    Vec v = Vec::Zero(grid.size);
    v.head(*cells).setOnes();
    return {grid, std::move(v)};
}

inline GridVector sample_indicator_window(double c, const CyclicModel& model) {
    return sample_indicator_window(c, model.grid());
}

} // namespace asflab
