// SPDX-License-Identifier: Apache-2.0
#pragma once

// Cyclic translation and modulation, and finite Gabor families built from them.

#include <asflab/model.hpp>

#include <cstdint>
#include <numbers>

namespace asflab {

/// Non-negative remainder.
inline std::int64_t mod_floor(std::int64_t a, std::int64_t n) {
    const auto r = a % n;
    return r < 0 ? r + n : r;
}

/// e^{2 pi i t / n}. Quarter-period phases are returned exactly.
inline cplx unit_root(std::int64_t t, std::int64_t n) {
    t = mod_floor(t, n);
    if ((4 * t) % n == 0) {
        switch ((4 * t) / n) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
}

/// out[j] = f[(j - n_steps) mod L].
inline GridVector translate(const GridVector& f, std::int64_t n_steps) {
    const auto L = f.size();
    Vec out(L);
    for (std::int64_t j = 0; j < L; ++j) out[j] = f[mod_floor(j - n_steps, L)];
    return {f.grid(), std::move(out)};
}

/// out[j] = e^{2 pi i m df j / L} f[j].
inline GridVector modulate(const GridVector& f, std::int64_t m_index, std::int64_t df) {
    const auto L = f.size();
    const auto step = mod_floor(m_index * df, L);
    Vec out(L);
    for (std::int64_t j = 0; j < L; ++j) out[j] = unit_root(step * j, L) * f[j];
    return {f.grid(), std::move(out)};
}

/// Orientation of the modulation phase. Synthesis families use Positive.
/// Analysis functionals use Negative so that the bilinear pairing against a
/// conjugated window coincides with the Hilbert inner product.
enum class Orientation { Positive = 1, Negative = -1 };

/// {E_{m df} T_{n dt} window}, 0 <= m < L/df, 0 <= n < L/dt, ordered with n
/// outer and m inner: k = n * (L/df) + m.
class GaborFamily {
public:
    GaborFamily(GridVector window, std::int64_t dt, std::int64_t df,
                Orientation orientation = Orientation::Positive)
        : window_(std::move(window)), dt_(dt), df_(df), orientation_(orientation) {
        const auto L = window_.size();
        if (dt_ < 1 || df_ < 1 || L % dt_ != 0 || L % df_ != 0)
            throw IncommensurateParameters("lattice steps (" + std::to_string(dt_) + ", " +
                                           std::to_string(df_) + ") must divide grid size " +
                                           std::to_string(L));
    }

    const GridVector& window() const { return window_; }
    const Grid& grid() const { return window_.grid(); }
    std::int64_t dt() const { return dt_; }
    std::int64_t df() const { return df_; }
    Orientation orientation() const { return orientation_; }

    std::int64_t mod_count() const { return window_.size() / df_; }
    std::int64_t shift_count() const { return window_.size() / dt_; }
    std::int64_t size() const { return mod_count() * shift_count(); }
    double redundancy() const {
        return static_cast<double>(window_.size()) / static_cast<double>(dt_ * df_);
    }

    /// (m, n) of element k.
    std::pair<std::int64_t, std::int64_t> index(std::int64_t k) const {
        return {k % mod_count(), k / mod_count()};
    }

    GridVector element(std::int64_t k) const {
        if (k < 0 || k >= size()) throw DimensionError("family index out of range");
        const auto [m, n] = index(k);
        const auto sign = static_cast<std::int64_t>(orientation_);
        return modulate(translate(window_, n * dt_), sign * m, df_);
    }

private:
    GridVector window_;
    std::int64_t dt_;
    std::int64_t df_;
    Orientation orientation_;
};

inline GaborFamily gabor_family(const GridVector& window, std::int64_t dt, std::int64_t df) {
    return GaborFamily(window, dt, df);
}

} // namespace asflab
