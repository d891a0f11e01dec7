// SPDX-License-Identifier: Apache-2.0
#pragma once

//
// ASF classification on a finite model.
//
// S is ASF on the model when it is bounded and invertible with a usable
// condition number: upper = |S|_{p->p}, lower = 1 / |S^{-1}|_{p->p}. Both are
// estimates (lower bounds on the respective norms), so the verdict has three
// outcomes. A finite model never decides the infinite-dimensional question;
// scale_study reports how the bounds move as the grid is refined.
//

#include <asflab/frameop.hpp>
#include <asflab/pnorms.hpp>

#include <json.hpp>

#include <algorithm>
#include <future>
#include <limits>
#include <string>
#include <vector>

namespace asflab {

enum class Classification { Asf, NotAsf, Undecided };

inline const char* to_string(Classification c) {
    switch (c) {
    case Classification::Asf: return "ASF";
    case Classification::NotAsf: return "NOT_ASF";
    default: return "UNDECIDED";
    }
}

struct Tolerances {
    /// NOT_ASF when lower <= eps_sing * upper.
    double eps_sing = 1e-8;
    /// ASF requires condition <= kappa_max.
    double kappa_max = 1e8;
    std::int64_t dense_cap = default_dense_cap;
    EstimatorOptions estimator{};
    /// scale_study: relative spread of lower bounds below which the trend is STABLE.
    double stable_spread = 0.1;
    /// scale_study: first/last lower-bound ratio at or above which the trend is DEGENERATING.
    double degenerate_factor = 2.0;
};

struct ModelDescriptor {
    std::int64_t size;
    double spacing;
    double period;
    std::int64_t dt_synth, df_synth, dt_anal, df_anal;
};

inline ModelDescriptor describe(const FramePair& pair) {
    const auto& g = pair.grid();
    return {g.size,
            g.spacing,
            g.period(),
            pair.synth_family().dt(),
            pair.synth_family().df(),
            pair.anal_family().dt(),
            pair.anal_family().df()};
}

struct Verdict {
    Classification classification = Classification::Undecided;
    double p = 2.0;
    double upper = 0.0;
    double lower = 0.0;
    double condition = std::numeric_limits<double>::infinity();
    double bessel_bound = 0.0;
    bool converged = false;
    ModelDescriptor model{};
    Tolerances tolerances{};
};

namespace detail {

inline Vec analysis_unweighted(const FramePair& pair, const Vec& x) {
    const auto& fam = pair.anal_family();
    return analyze(x, fam.window().values(), fam.dt(), fam.df(), fam.orientation(), pair.grid().spacing);
}

} // namespace detail

/// Classifies the pair at exponent p. Dense up to tol.dense_cap, matrix-free above.
inline Verdict asf_verdict(const FramePair& pair, double p, const Tolerances& tol = {}) {
    conjugate_exponent(p);
    Verdict v;
    v.p = p;
    v.model = describe(pair);
    v.tolerances = tol;

    NormEstimate up;
    NormEstimate inv;
    if (pair.dim() <= tol.dense_cap) {
        const Matrix S = assemble_frame_matrix(pair, tol.dense_cap);
        up = opnorm_estimate(S, p, tol.estimator);
        inv = inverse_opnorm_estimate(S, p, tol.estimator);
    } else {
        const auto grid = pair.grid();
        LinearMap apply = [&pair, grid](const Vec& x) {
            return frame_operator_apply(pair, GridVector(grid, x)).values();
        };
        LinearMap adjoint = [&pair](const Vec& x) { return frame_operator_adjoint_apply(pair, x); };
        up = opnorm_estimate(apply, adjoint, pair.dim(), p, tol.estimator);
        inv = inverse_opnorm_estimate(apply, adjoint, pair.dim(), p, tol.estimator);
    }

    const auto bessel = opnorm_estimate(
        [&pair](const Vec& x) { return detail::analysis_unweighted(pair, x); },
        [&pair](const Vec& c) { return analysis_adjoint_apply(pair, c); }, pair.dim(), p, tol.estimator);
    v.bessel_bound = bessel.value * std::pow(pair.grid().spacing, -1.0 / p);

    v.upper = up.value;
    v.converged = up.converged && inv.converged;
    bool crossed = false;
    if (std::isinf(inv.value) || inv.value == 0.0) {
        v.lower = 0.0;
    } else {
        v.lower = 1.0 / inv.value;
        if (v.lower > v.upper) {
            crossed = v.lower > v.upper * (1.0 + 1e-9);
            v.lower = v.upper;
        }
    }
    v.condition = v.lower > 0.0 ? v.upper / v.lower : std::numeric_limits<double>::infinity();

    if (v.lower <= tol.eps_sing * v.upper)
        v.classification = Classification::NotAsf;
    else if (v.condition <= tol.kappa_max && v.converged && !crossed)
        v.classification = Classification::Asf;
    else
        v.classification = Classification::Undecided;
    return v;
}

/// Covering counts and the exact frame bounds they imply in the painless case.
struct PainlessOracle {
    GridVector covering;
    FrameBounds bounds;
};

/// G[j] = #{n in Z : j h - n a in [0, c)}, counted directly; bounds (min G / b, max G / b).
/// Requires c <= 1/b, and a, c commensurate with the grid spacing.
inline PainlessOracle painless_oracle(double a, double b, double c, const CyclicModel& model) {
    if (!(a > 0) || !(b > 0) || !(c > 0)) throw DomainError("oracle parameters must be positive");
    if (c * b > 1.0 + integrality_tol)
        throw DomainError("painless condition c <= 1/b violated; covering oracle does not apply");
    const double h = model.spacing();
    const auto step = as_integer(a / h);
    const auto cells = as_integer(c / h);
    if (!step || *step < 1) throw IncommensurateParameters("a/grid_res is not a positive integer");
    if (!cells || *cells < 1) throw IncommensurateParameters("c/grid_res is not a positive integer");
    if (*cells > model.size()) throw DomainError("window length exceeds the period");

    const auto L = model.size();
    Vec G(L);
    for (std::int64_t j = 0; j < L; ++j) {
        // Candidates n with j - n*step in [0, cells): n in [(j - cells)/step, j/step].
        std::int64_t count = 0;
        const auto lo = (j - *cells) / *step - 1;
        const auto hi = j / *step + 1;
        for (auto n = lo; n <= hi; ++n) {
            const auto offset = j - n * *step;
            if (offset >= 0 && offset < *cells) ++count;
        }
        G[j] = static_cast<double>(count);
    }
    const double gmin = G.real().minCoeff();
    const double gmax = G.real().maxCoeff();
    return {GridVector(model.grid(), std::move(G)), FrameBounds(gmin / b, gmax / b)};
}

enum class Trend { Stable, Degenerating, Inconclusive };

inline const char* to_string(Trend t) {
    switch (t) {
    case Trend::Stable: return "STABLE";
    case Trend::Degenerating: return "DEGENERATING";
    default: return "INCONCLUSIVE";
    }
}

struct ScaleRow {
    std::int64_t size;
    double lower;
    double upper;
    double condition;
    Classification classification;
};

struct ScaleStudy {
    std::vector<ScaleRow> rows;
    /// Sizes whose model was incommensurate.
    std::vector<std::int64_t> gaps;
    Trend trend = Trend::Inconclusive;
    double stable_spread = 0.1;
    double degenerate_factor = 2.0;
    /// Verdict at the largest evaluated size.
    std::optional<Verdict> finest;
};

/// Trend over rows sorted by size.
inline Trend classify_trend(const std::vector<ScaleRow>& rows, double stable_spread, double degenerate_factor) {
    if (rows.size() < 2) return Trend::Inconclusive;
    const double first = rows.front().lower;
    const double last = rows.back().lower;
    if (last == 0.0 || first >= degenerate_factor * last) return Trend::Degenerating;
    const auto tail = rows.begin() + static_cast<std::ptrdiff_t>(rows.size() / 2);
    double lo = tail->lower, hi = tail->lower;
    for (auto it = tail; it != rows.end(); ++it) {
        lo = std::min(lo, it->lower);
        hi = std::max(hi, it->lower);
    }
    const bool agree = std::all_of(rows.begin(), rows.end(), [&](const ScaleRow& r) {
        return r.classification == rows.front().classification;
    });
    if (lo > 0.0 && (hi - lo) / hi < stable_spread && agree) return Trend::Stable;
    return Trend::Inconclusive;
}

/// Indicator-window pair refined over the given grid sizes (h = period / L).
/// Sizes must be strictly increasing; incommensurate sizes are recorded as gaps.
inline ScaleStudy scale_study(const GaborTriple& synth, const GaborTriple& anal, double period, double p,
                              const std::vector<std::int64_t>& sizes, const Tolerances& tol = {}) {
    conjugate_exponent(p);
    if (sizes.empty()) throw DomainError("scale study needs at least one grid size");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1]) throw DomainError("grid sizes must be strictly increasing");

    std::vector<std::future<std::optional<Verdict>>> jobs;
    jobs.reserve(sizes.size());
    for (const auto L : sizes) {
        jobs.push_back(std::async(std::launch::async, [=, &tol]() -> std::optional<Verdict> {
            try {
                const double h = period / static_cast<double>(L);
                const auto model = build_cyclic_model(synth, anal, h, period);
                return asf_verdict(indicator_pair(model, synth.win_len, anal.win_len), p, tol);
            } catch (const IncommensurateParameters&) {
                return std::nullopt;
            }
        }));
    }

    ScaleStudy study;
    study.stable_spread = tol.stable_spread;
    study.degenerate_factor = tol.degenerate_factor;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        auto v = jobs[i].get();
        if (!v) {
            study.gaps.push_back(sizes[i]);
            continue;
        }
        study.rows.push_back({sizes[i], v->lower, v->upper, v->condition, v->classification});
        study.finest = std::move(v);
    }
    study.trend = classify_trend(study.rows, tol.stable_spread, tol.degenerate_factor);
    return study;
}

//
// JSON: lowercase snake-case keys, non-finite numbers as strings ("inf").
//

inline nlohmann::json json_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

inline nlohmann::json to_json(const ModelDescriptor& m) {
    return {{"size", m.size},         {"spacing", m.spacing},     {"period", m.period},
            {"dt_synth", m.dt_synth}, {"df_synth", m.df_synth},   {"dt_anal", m.dt_anal},
            {"df_anal", m.df_anal}};
}

inline nlohmann::json to_json(const Tolerances& t) {
    return {{"eps_sing", t.eps_sing},
            {"kappa_max", t.kappa_max},
            {"dense_cap", t.dense_cap},
            {"estimator_tol", t.estimator.tol},
            {"estimator_max_iter", t.estimator.max_iter},
            {"estimator_random_starts", t.estimator.random_starts},
            {"seed", t.estimator.seed}};
}

inline nlohmann::json to_json(const Verdict& v) {
    return {{"classification", to_string(v.classification)},
            {"p", v.p},
            {"upper", json_number(v.upper)},
            {"lower", json_number(v.lower)},
            {"condition", json_number(v.condition)},
            {"bessel_bound", json_number(v.bessel_bound)},
            {"bessel_note", "analysis-map p->p norm on the finite model; not a certified "
                            "p-approximate Bessel constant"},
            {"converged", v.converged},
            {"model", to_json(v.model)},
            {"tolerances", to_json(v.tolerances)}};
}

inline nlohmann::json to_json(const ScaleStudy& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"size", r.size},
                        {"lower", json_number(r.lower)},
                        {"upper", json_number(r.upper)},
                        {"condition", json_number(r.condition)},
                        {"classification", to_string(r.classification)}});
    return {{"rows", rows},
            {"gaps", s.gaps},
            {"trend", to_string(s.trend)},
            {"stable_spread", s.stable_spread},
            {"degenerate_factor", s.degenerate_factor}};
}

} // namespace asflab
