// SPDX-License-Identifier: Apache-2.0
#pragma once

//
// Grid sweeps over (a, b, c, alpha, beta, rho, p) with deterministic output.
//
// Grid index is lexicographic in the axis order above (a slowest, p fastest).
// Rows are computed in any order by a pool of workers and always emitted
// sorted by index, so output bytes do not depend on scheduling. Sweep specs
// are JSON; the CSV header comment carries a digest of the canonical spec so
// partial tables can be resumed safely.
//

#include <asflab/verdict.hpp>

#include <json.hpp>

#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace asflab {

inline constexpr std::array<const char*, 7> axis_names = {"a", "b", "c", "alpha", "beta", "rho", "p"};
inline constexpr std::size_t default_grid_cap = 1'000'000;
inline constexpr const char* csv_columns =
    "idx,a,b,c,alpha,beta,rho,p,L,status,classification,lower,upper,condition,bessel_bound,ms";

namespace status {
inline constexpr const char* ok = "OK";
inline constexpr const char* skipped_incommensurate = "SKIPPED-INCOMMENSURATE";
inline constexpr const char* skipped_invalid = "SKIPPED-INVALID";
} // namespace status

struct SweepSpec {
    /// Expanded values per axis, indexed like axis_names. Analysis axes
    /// (alpha, beta, rho) may be empty: they then follow a, b, c per point.
    std::array<std::vector<double>, 7> axes;
    double period = 0.0;
    /// Exactly one of grid_res / sizes is set. More than one size selects the
    /// scale-study policy.
    std::optional<double> grid_res;
    std::vector<std::int64_t> sizes;
    Tolerances tolerances{};
    std::uint64_t seed = 0;
    bool timing = false;
    std::size_t grid_cap = default_grid_cap;

    bool scale_policy() const { return sizes.size() > 1; }

    std::size_t grid_size() const {
        std::size_t n = 1;
        for (const auto& ax : axes)
            if (!ax.empty()) n *= ax.size();
        return n;
    }
};

namespace detail {

inline std::vector<double> parse_axis(const nlohmann::json& j, const std::string& name) {
    std::vector<double> vals;
    if (j.is_number()) {
        vals.push_back(j.get<double>());
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) throw SpecError("axis '" + name + "' has a non-numeric entry");
            vals.push_back(v.get<double>());
        }
    } else if (j.is_object()) {
        if (!j.contains("start") || !j.contains("stop") || !j.contains("count"))
            throw SpecError("range axis '" + name + "' needs start, stop and count");
        const double start = j.at("start").get<double>();
        const double stop = j.at("stop").get<double>();
        const auto count = j.at("count").get<std::int64_t>();
        if (count < 1) throw SpecError("range axis '" + name + "' needs count >= 1");
        for (std::int64_t i = 0; i < count; ++i)
            vals.push_back(count == 1 ? start
                                      : start + static_cast<double>(i) * (stop - start) /
                                                    static_cast<double>(count - 1));
    } else {
        throw SpecError("axis '" + name + "' must be a number, a list or a {start, stop, count} range");
    }
    if (vals.empty()) throw SpecError("axis '" + name + "' is empty");
    for (double v : vals)
        if (!std::isfinite(v) || !(v > 0)) throw SpecError("axis '" + name + "' values must be positive");
    if (name == "p")
        for (double v : vals)
            if (!(v > 1.0)) throw SpecError("exponent axis values must satisfy 1 < p < inf");
    return vals;
}

inline std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace detail

/// Parses a JSON sweep spec:
///   {"axes": {"a": [..] | x | {"start","stop","count"}, ...},
///    "model": {"period": P, "grid_res": h | "size": L | "sizes": [L...]},
///    "tolerances": {"eps_sing", "kappa_max", "dense_cap"}, "seed": s, "timing": false}
inline SweepSpec parse_sweep_spec(const nlohmann::json& j) {
    SweepSpec spec;
    try {
        if (!j.is_object() || !j.contains("axes") || !j.at("axes").is_object())
            throw SpecError("sweep spec needs an 'axes' object");
        const auto& axes = j.at("axes");
        for (const auto& [key, _] : axes.items())
            if (std::find_if(axis_names.begin(), axis_names.end(), [&](const char* n) { return key == n; }) ==
                axis_names.end())
                throw SpecError("unknown axis '" + key + "'");
        for (std::size_t i = 0; i < axis_names.size(); ++i) {
            const std::string name = axis_names[i];
            if (axes.contains(name)) {
                spec.axes[i] = detail::parse_axis(axes.at(name), name);
            } else if (i < 3 || i == 6) {
                throw SpecError("missing required axis '" + name + "'");
            }
        }

        if (!j.contains("model") || !j.at("model").is_object()) throw SpecError("sweep spec needs a 'model' object");
        const auto& model = j.at("model");
        if (!model.contains("period")) throw SpecError("model needs 'period'");
        spec.period = model.at("period").get<double>();
        if (!(spec.period > 0)) throw SpecError("model period must be positive");
        const int policies = int(model.contains("grid_res")) + int(model.contains("size")) +
                             int(model.contains("sizes"));
        if (policies != 1) throw SpecError("model needs exactly one of 'grid_res', 'size', 'sizes'");
        if (model.contains("grid_res")) {
            spec.grid_res = model.at("grid_res").get<double>();
            if (!(*spec.grid_res > 0)) throw SpecError("grid_res must be positive");
        } else if (model.contains("size")) {
            spec.sizes = {model.at("size").get<std::int64_t>()};
        } else {
            spec.sizes = model.at("sizes").get<std::vector<std::int64_t>>();
            if (spec.sizes.empty()) throw SpecError("model 'sizes' is empty");
        }
        for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
            if (spec.sizes[i] < 1) throw SpecError("grid sizes must be positive");
            if (i > 0 && spec.sizes[i] <= spec.sizes[i - 1])
                throw SpecError("grid sizes must be strictly increasing");
        }

        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            spec.tolerances.eps_sing = t.value("eps_sing", spec.tolerances.eps_sing);
            spec.tolerances.kappa_max = t.value("kappa_max", spec.tolerances.kappa_max);
            spec.tolerances.dense_cap = t.value("dense_cap", spec.tolerances.dense_cap);
            spec.tolerances.stable_spread = t.value("stable_spread", spec.tolerances.stable_spread);
            spec.tolerances.degenerate_factor = t.value("degenerate_factor", spec.tolerances.degenerate_factor);
        }
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.tolerances.estimator.seed = spec.seed;
        spec.timing = j.value("timing", false);
        spec.grid_cap = j.value("grid_cap", default_grid_cap);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("malformed sweep spec: ") + e.what());
    }
    const auto n = spec.grid_size();
    if (n < 1 || n > spec.grid_cap)
        throw SpecError("grid size " + std::to_string(n) + " outside [1, " + std::to_string(spec.grid_cap) + "]");
    return spec;
}

inline SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read sweep spec " + path.string());
    try {
        return parse_sweep_spec(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("sweep spec is not valid JSON: ") + e.what());
    }
}

/// Canonical form of a spec: expanded axes, resolved policy, all tolerances.
/// Timing is excluded: it changes the ms column only.
inline nlohmann::json canonical_json(const SweepSpec& spec) {
    nlohmann::json axes = nlohmann::json::object();
    for (std::size_t i = 0; i < axis_names.size(); ++i)
        if (!spec.axes[i].empty()) axes[axis_names[i]] = spec.axes[i];
    nlohmann::json model = {{"period", spec.period}};
    if (spec.grid_res) model["grid_res"] = *spec.grid_res;
    else model["sizes"] = spec.sizes;
    return {{"axes", axes},
            {"model", model},
            {"tolerances",
             {{"eps_sing", spec.tolerances.eps_sing},
              {"kappa_max", spec.tolerances.kappa_max},
              {"dense_cap", spec.tolerances.dense_cap},
              {"stable_spread", spec.tolerances.stable_spread},
              {"degenerate_factor", spec.tolerances.degenerate_factor}}},
            {"seed", spec.seed}};
}

/// 16 hex digits of FNV-1a over the canonical JSON dump.
inline std::string spec_hash(const SweepSpec& spec) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(canonical_json(spec).dump())));
    return buf;
}

struct ResultRow {
    std::size_t idx = 0;
    /// a, b, c, alpha, beta, rho, p
    std::array<double, 7> params{};
    std::optional<std::int64_t> size;
    std::string status;
    std::optional<Classification> classification;
    std::optional<double> lower, upper, condition, bessel_bound;
    std::optional<double> ms;

    bool skipped() const { return status.rfind("SKIPPED", 0) == 0; }
};

struct ResultTable {
    std::string spec_hash;
    std::vector<ResultRow> rows;
};

/// Parameter tuple at a lexicographic grid index.
inline std::array<double, 7> grid_point(const SweepSpec& spec, std::size_t idx) {
    std::array<std::size_t, 7> pos{};
    for (std::size_t i = axis_names.size(); i-- > 0;) {
        const auto& ax = spec.axes[i];
        if (ax.empty()) continue;
        pos[i] = idx % ax.size();
        idx /= ax.size();
    }
    std::array<double, 7> params{};
    for (std::size_t i = 0; i < 7; ++i) {
        const auto& ax = spec.axes[i];
        params[i] = ax.empty() ? params[i - 3] : ax[pos[i]];
    }
    return params;
}

namespace detail {

inline void fill_verdict(ResultRow& row, const Verdict& v) {
    row.size = v.model.size;
    row.classification = v.classification;
    row.lower = v.lower;
    row.upper = v.upper;
    row.condition = v.condition;
    row.bessel_bound = v.bessel_bound;
}

} // namespace detail

/// Evaluates one grid point. Never throws for parameter problems: those become
/// SKIPPED rows.
inline ResultRow evaluate_point(const SweepSpec& spec, std::size_t idx) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRow row;
    row.idx = idx;
    row.params = grid_point(spec, idx);
    const auto& prm = row.params;
    try {
        const GaborTriple synth(prm[0], prm[1], prm[2]);
        const GaborTriple anal(prm[3], prm[4], prm[5]);
        const double p = prm[6];
        if (spec.scale_policy()) {
            const auto study = scale_study(synth, anal, spec.period, p, spec.sizes, spec.tolerances);
            if (!study.finest) {
                row.status = status::skipped_incommensurate;
            } else {
                row.status = to_string(study.trend);
                detail::fill_verdict(row, *study.finest);
            }
        } else {
            const double h = spec.grid_res ? *spec.grid_res : spec.period / static_cast<double>(spec.sizes.front());
            const auto model = build_cyclic_model(synth, anal, h, spec.period);
            const auto pair = indicator_pair(model, synth.win_len, anal.win_len);
            detail::fill_verdict(row, asf_verdict(pair, p, spec.tolerances));
            row.status = status::ok;
        }
    } catch (const IncommensurateParameters&) {
        row = ResultRow{idx, prm, {}, status::skipped_incommensurate, {}, {}, {}, {}, {}, {}};
    } catch (const DomainError&) {
        row = ResultRow{idx, prm, {}, status::skipped_invalid, {}, {}, {}, {}, {}, {}};
    } catch (const DimensionError&) {
        row = ResultRow{idx, prm, {}, status::skipped_invalid, {}, {}, {}, {}, {}, {}};
    }
    if (spec.timing)
        row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

using RowCallback = std::function<void(const ResultRow&)>;

namespace detail {

inline ResultTable compute_missing(const SweepSpec& spec, std::vector<std::optional<ResultRow>> slots,
                                   int workers, const RowCallback& on_row) {
    if (workers < 1) throw SpecError("workers must be >= 1");
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (!slots[i]) todo.push_back(i);

    std::atomic<std::size_t> next{0};
    std::mutex emit;
    auto work = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < todo.size();) {
            auto row = evaluate_point(spec, todo[t]);
            std::lock_guard lock(emit);
            slots[todo[t]] = row;
            if (on_row) on_row(row);
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(1, todo.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_threads; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    ResultTable table{spec_hash(spec), {}};
    table.rows.reserve(slots.size());
    for (auto& s : slots) table.rows.push_back(std::move(*s));
    return table;
}

} // namespace detail

/// Evaluates every grid point with `workers` threads. `on_row` is called
/// (serialized) as rows complete, in completion order.
inline ResultTable run_sweep(const SweepSpec& spec, int workers = 1, const RowCallback& on_row = {}) {
    return detail::compute_missing(spec, std::vector<std::optional<ResultRow>>(spec.grid_size()), workers, on_row);
}

/// Completes a partial table of the same spec; only missing indices are computed.
inline ResultTable resume_sweep(const SweepSpec& spec, const ResultTable& partial, int workers = 1,
                                const RowCallback& on_row = {}) {
    const auto hash = spec_hash(spec);
    if (partial.spec_hash != hash)
        throw SpecError("partial table was produced by spec " + partial.spec_hash + ", current spec is " + hash);
    std::vector<std::optional<ResultRow>> slots(spec.grid_size());
    for (const auto& row : partial.rows) {
        if (row.idx >= slots.size()) throw SpecError("partial row index " + std::to_string(row.idx) + " out of range");
        if (slots[row.idx]) throw SpecError("duplicate partial row index " + std::to_string(row.idx));
        slots[row.idx] = row;
    }
    return detail::compute_missing(spec, std::move(slots), workers, on_row);
}

//
// CSV
//

inline std::string to_csv(const ResultTable& table) {
    std::ostringstream os;
    os << "# asf-lab v1 spec=" << table.spec_hash << '\n' << csv_columns << '\n';
    auto opt = [](const std::optional<double>& x) { return x ? detail::format_double(*x) : std::string(); };
    auto sorted = table.rows;
    std::sort(sorted.begin(), sorted.end(), [](const ResultRow& l, const ResultRow& r) { return l.idx < r.idx; });
    for (const auto& r : sorted) {
        os << r.idx;
        for (double x : r.params) os << ',' << detail::format_double(x);
        os << ',' << (r.size ? std::to_string(*r.size) : std::string()) << ',' << r.status << ','
           << (r.classification ? to_string(*r.classification) : "") << ',' << opt(r.lower) << ','
           << opt(r.upper) << ',' << opt(r.condition) << ',' << opt(r.bessel_bound) << ',' << opt(r.ms) << '\n';
    }
    return os.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw SpecError("malformed number '" + s + "' in result table");
    return x;
}

inline std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

inline Classification parse_classification(const std::string& s) {
    if (s == "ASF") return Classification::Asf;
    if (s == "NOT_ASF") return Classification::NotAsf;
    if (s == "UNDECIDED") return Classification::Undecided;
    throw SpecError("unknown classification '" + s + "'");
}

} // namespace detail

inline ResultTable parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    ResultTable table;
    const std::string prefix = "# asf-lab v1 spec=";
    if (!std::getline(is, line) || line.rfind(prefix, 0) != 0)
        throw SpecError("result table lacks the '# asf-lab v1 spec=' header");
    table.spec_hash = line.substr(prefix.size());
    if (!std::getline(is, line) || line != csv_columns) throw SpecError("result table has unexpected columns");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 16) throw SpecError("result row has " + std::to_string(f.size()) + " fields, expected 16");
        ResultRow r;
        r.idx = static_cast<std::size_t>(std::stoull(f[0]));
        for (std::size_t i = 0; i < 7; ++i) r.params[i] = detail::parse_double(f[1 + i]);
        if (!f[8].empty()) r.size = std::stoll(f[8]);
        r.status = f[9];
        if (!f[10].empty()) r.classification = detail::parse_classification(f[10]);
        r.lower = detail::parse_opt(f[11]);
        r.upper = detail::parse_opt(f[12]);
        r.condition = detail::parse_opt(f[13]);
        r.bessel_bound = detail::parse_opt(f[14]);
        r.ms = detail::parse_opt(f[15]);
        table.rows.push_back(std::move(r));
    }
    return table;
}

/// Writes via a sibling temporary file and rename, so readers never see a torn file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

//
// Heatmaps
//

enum class HeatmapMetric { Classification, Condition };

struct PgmImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    /// Binary P5, maxval 255.
    std::string encode() const {
        std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
        out.append(pixels.begin(), pixels.end());
        return out;
    }
};

inline std::uint8_t classification_pixel(const ResultRow& r) {
    if (r.skipped() || !r.classification) return 64;
    switch (*r.classification) {
    case Classification::Asf: return 255;
    case Classification::NotAsf: return 0;
    default: return 128;
    }
}

/// round(255 * log10(cond) / log10(cap)), clipped to [0, 255]. Infinite
/// condition saturates at 255; skipped cells are 0.
inline std::uint8_t condition_pixel(const ResultRow& r, double cap) {
    if (r.skipped() || !r.condition) return 0;
    const double c = *r.condition;
    if (std::isinf(c) || std::isnan(c)) return 255;
    const double v = 255.0 * std::log10(std::max(c, 1.0)) / std::log10(cap);
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

inline std::size_t axis_index(const std::string& name) {
    for (std::size_t i = 0; i < axis_names.size(); ++i)
        if (name == axis_names[i]) return i;
    throw SpecError("'" + name + "' is not a sweep axis");
}

/// One pixel per (x, y) cell, x left to right, y increasing downward. Axes other
/// than x and y that vary independently are pinned to `fixed` values (default:
/// smallest value present).
inline PgmImage emit_heatmap(const ResultTable& table, const std::string& x_axis, const std::string& y_axis,
                             HeatmapMetric metric, const std::map<std::string, double>& fixed = {},
                             double condition_cap = 1e8) {
    const auto xi = axis_index(x_axis);
    const auto yi = axis_index(y_axis);
    if (xi == yi) throw SpecError("heatmap axes must differ");
    for (const auto& [name, _] : fixed) axis_index(name);

    std::vector<const ResultRow*> rows;
    for (const auto& r : table.rows) rows.push_back(&r);

    for (std::size_t ai = 0; ai < axis_names.size(); ++ai) {
        if (ai == xi || ai == yi) continue;
        std::optional<double> pin;
        if (auto it = fixed.find(axis_names[ai]); it != fixed.end()) {
            pin = it->second;
        } else {
            // Pin only axes that are not already determined by the cell.
            std::map<std::pair<double, double>, double> seen;
            bool determined = true;
            double smallest = std::numeric_limits<double>::infinity();
            for (const auto* r : rows) {
                smallest = std::min(smallest, r->params[ai]);
                auto [it2, inserted] = seen.emplace(std::make_pair(r->params[xi], r->params[yi]), r->params[ai]);
                if (!inserted && it2->second != r->params[ai]) determined = false;
            }
            if (!determined) pin = smallest;
        }
        if (pin) std::erase_if(rows, [&](const ResultRow* r) { return r->params[ai] != *pin; });
    }
    if (rows.empty()) throw SpecError("heatmap slice is empty");

    std::set<double> xs, ys;
    for (const auto* r : rows) {
        xs.insert(r->params[xi]);
        ys.insert(r->params[yi]);
    }
    const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
    PgmImage img;
    img.width = xv.size();
    img.height = yv.size();
    std::vector<const ResultRow*> cells(img.width * img.height, nullptr);
    for (const auto* r : rows) {
        const auto cx = static_cast<std::size_t>(std::lower_bound(xv.begin(), xv.end(), r->params[xi]) - xv.begin());
        const auto cy = static_cast<std::size_t>(std::lower_bound(yv.begin(), yv.end(), r->params[yi]) - yv.begin());
        auto& cell = cells[cy * img.width + cx];
        if (cell) throw SpecError("heatmap cell has more than one row; pin the remaining axes");
        cell = r;
    }
    img.pixels.reserve(cells.size());
    for (const auto* cell : cells) {
        if (!cell) throw SpecError("heatmap slice is incomplete");
        img.pixels.push_back(metric == HeatmapMetric::Classification ? classification_pixel(*cell)
                                                                     : condition_pixel(*cell, condition_cap));
    }
    return img;
}

} // namespace asflab
