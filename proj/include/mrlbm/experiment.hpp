#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrlbm/exact.hpp"
#include "mrlbm/mesh.hpp"
#include "mrlbm/metrics.hpp"
#include "mrlbm/solver.hpp"

namespace mrlbm {

/// Sweep configuration: which (l_max, l_jump) pairs to run and the scheme /
/// problem parameters shared by every run.
struct ExperimentConfig {
    int lmax_lo = 7;
    int lmax_hi = 13;
    std::vector<int> l_jumps = {1, 2, 3, 4, 5};
    double lambda = 1.0;
    double p = 1.7;
    double c = 0.5;
    double T = 1.5625;
    double x_lo = 0.0;
    double x_hi = 3.0;
    double jump_x = 2.0;
    std::string out_dir = ".";
    std::vector<double> snapshot_times;  // empty: {0, T}

    void validate() const {
        if (lmax_lo > lmax_hi) throw std::invalid_argument("config: empty l_max range");
        if (l_jumps.empty()) throw std::invalid_argument("config: empty l_jump list");
        for (int j : l_jumps) {
            if (j < 0) throw std::invalid_argument("config: negative l_jump");
            if (lmax_lo - j < 1)
                throw std::invalid_argument("config: needs l_max - l_jump >= 1 for every pair");
        }
        if (!(T >= 0.0)) throw std::invalid_argument("config: negative final time");
    }

    WaveProblem problem() const { return WaveProblem{c, gaussian_u0, T}; }
    SchemeSpec scheme() const { return d1q3_wave_scheme(c, lambda, p); }
};

/// One sweep row: the error report plus conservation diagnostics of the
/// jump run (relative drift of the u and v totals over [0, T]).
struct RunRow {
    ErrorReport report;
    double u_drift = 0.0;
    double v_drift = 0.0;
};

struct TableResult {
    std::vector<RunRow> rows;  // ordered by (l_jump, l_max)
};

namespace detail {

struct SweepCache {
    // keyed by l_max: final u on the uniform finest mesh
    std::map<int, std::vector<double>> ref_u;
    std::map<int, double> e_ref;
};

inline std::vector<double> conserved_totals(const FieldState& state) {
    return {total_conserved_moment(state, 0), total_conserved_moment(state, 1)};
}

}  // namespace detail

/// Run reference / coarse / jump simulations for every (l_jump, l_max) pair
/// and evaluate the six metrics. Reference runs are shared across blocks.
/// Deterministic: identical configs give identical tables.
inline TableResult run_table(const ExperimentConfig& cfg,
                             const std::function<void(const std::string&)>& progress = nullptr) {
    cfg.validate();
    const WaveProblem problem = cfg.problem();
    const SchemeSpec scheme = cfg.scheme();
    const auto zero = [](double) { return 0.0; };

    detail::SweepCache cache;
    TableResult table;

    std::vector<int> jumps = cfg.l_jumps;
    std::sort(jumps.begin(), jumps.end());
    jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());

    for (int l_jump : jumps) {
        const ErrorReport* prev = nullptr;
        for (int l_max = cfg.lmax_lo; l_max <= cfg.lmax_hi; ++l_max) {
            const int l_min = l_max - l_jump;
            if (progress) {
                std::ostringstream msg;
                msg << "l_jump=" << l_jump << " l_max=" << l_max;
                progress(msg.str());
            }
            MeshConfig mesh{cfg.x_lo, cfg.x_hi, cfg.jump_x, l_min, l_max};

            if (!cache.ref_u.count(l_max)) {
                MeshConfig ref_mesh{cfg.x_lo, cfg.x_hi, cfg.jump_x, l_max, l_max};
                FieldState ref =
                    init_at_equilibrium(build_uniform_mesh(ref_mesh, l_max), scheme, problem.u0, zero);
                run(ref, cfg.T);
                cache.e_ref[l_max] = error_vs_exact(ref.grid(), ref.moment_field(0), problem,
                                                    cfg.T, l_max);
                cache.ref_u[l_max] = ref.finest_moment(0);
            }
            const std::vector<double>& ref_u = cache.ref_u[l_max];

            FieldState coarse =
                init_at_equilibrium(build_uniform_mesh(mesh, l_min), scheme, problem.u0, zero);
            run(coarse, cfg.T);
            const LevelField coarse_u = coarse.moment_field(0);

            FieldState jump = init_at_equilibrium(build_jump_mesh(mesh), scheme, problem.u0, zero);
            const std::vector<double> totals0 = detail::conserved_totals(jump);
            run(jump, cfg.T);
            const std::vector<double> totalsT = detail::conserved_totals(jump);
            const LevelField jump_u = jump.moment_field(0);

            RunRow row;
            row.report.l_max = l_max;
            row.report.l_jump = l_jump;
            row.report.E_ref = cache.e_ref[l_max];
            row.report.E_coarse =
                error_vs_exact(coarse.grid(), coarse_u, problem, cfg.T, l_max);
            row.report.D_coarse =
                diff_vs_ref(coarse.grid(), coarse_u, ref_u, problem, cfg.T, l_max);
            row.report.E_jump = error_vs_exact(jump.grid(), jump_u, problem, cfg.T, l_max);
            row.report.D_jump = diff_vs_ref(jump.grid(), jump_u, ref_u, problem, cfg.T, l_max);
            row.report.D_jump_refl =
                reflected_diff(jump.grid(), jump_u, ref_u, problem, cfg.T);
            const double scale = std::abs(totals0[0]);
            row.u_drift = std::abs(totalsT[0] - totals0[0]) / scale;
            row.v_drift = std::abs(totalsT[1] - totals0[1]) / scale;

            if (prev) {
                const auto rate = [](double a, double b) -> std::optional<double> {
                    if (a > 0.0 && b > 0.0) return std::log2(a / b);
                    return std::nullopt;
                };
                row.report.rate_E_ref = rate(prev->E_ref, row.report.E_ref);
                row.report.rate_E_coarse = rate(prev->E_coarse, row.report.E_coarse);
                row.report.rate_D_coarse = rate(prev->D_coarse, row.report.D_coarse);
                row.report.rate_E_jump = rate(prev->E_jump, row.report.E_jump);
                row.report.rate_D_jump = rate(prev->D_jump, row.report.D_jump);
                row.report.rate_D_jump_refl = rate(prev->D_jump_refl, row.report.D_jump_refl);
            }
            table.rows.push_back(row);
            prev = &table.rows.back().report;
        }
    }
    return table;
}

inline const char* table_csv_header() {
    return "l_max,l_jump,E_ref,E_coarse,D_coarse,E_jump,D_jump,D_jump_refl,"
           "rate_E_ref,rate_E_coarse,rate_D_coarse,rate_E_jump,rate_D_jump,rate_D_jump_refl";
}

namespace detail {

inline std::string sci6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

inline std::string sci6(const std::optional<double>& v) {
    return v ? sci6(*v) : std::string();
}

}  // namespace detail

/// Serialize a sweep in the fixed CSV schema: six-significant-digit
/// scientific notation, empty rate fields on the first l_max of each block.
inline std::string table_to_csv(const TableResult& table) {
    std::ostringstream out;
    out << table_csv_header() << '\n';
    for (const RunRow& row : table.rows) {
        const ErrorReport& r = row.report;
        out << r.l_max << ',' << r.l_jump << ',' << detail::sci6(r.E_ref) << ','
            << detail::sci6(r.E_coarse) << ',' << detail::sci6(r.D_coarse) << ','
            << detail::sci6(r.E_jump) << ',' << detail::sci6(r.D_jump) << ','
            << detail::sci6(r.D_jump_refl) << ',' << detail::sci6(r.rate_E_ref) << ','
            << detail::sci6(r.rate_E_coarse) << ',' << detail::sci6(r.rate_D_coarse) << ','
            << detail::sci6(r.rate_E_jump) << ',' << detail::sci6(r.rate_D_jump) << ','
            << detail::sci6(r.rate_D_jump_refl) << '\n';
    }
    return out.str();
}

/// Solution profiles (cell center, u, level) of a jump run and its
/// reference run at the requested times, one block per time.
struct SnapshotResult {
    std::string jump_blocks;
    std::string ref_blocks;
};

namespace detail {

inline void append_profile_block(std::string& out, const FieldState& state, double t) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# t=%.9g\n", t);
    out += buf;
    const auto u = state.moment_field(0);
    const auto& grid = state.grid();
    // emit in ascending x: walk levels by cell position
    struct Entry {
        double x;
        double value;
        int level;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(grid.real_cell_count()));
    for (std::size_t i = 0; i < grid.level_count(); ++i) {
        const auto& layout = grid.level(i);
        for (std::int64_t k = layout.real_lo; k < layout.real_hi; ++k)
            entries.push_back({cell_center(layout.level, k), u[i][layout.index(k)], layout.level});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.x < b.x; });
    for (const Entry& e : entries) {
        std::snprintf(buf, sizeof buf, "%.17g %.12e %d\n", e.x, e.value, e.level);
        out += buf;
    }
    out += '\n';
}

}  // namespace detail

inline SnapshotResult run_snapshot(const ExperimentConfig& cfg, int l_max, int l_jump,
                                   std::vector<double> times) {
    if (l_max - l_jump < 1)
        throw std::invalid_argument("run_snapshot: needs l_max - l_jump >= 1");
    if (times.empty()) times = {0.0, cfg.T};
    std::sort(times.begin(), times.end());
    const WaveProblem problem = cfg.problem();
    const SchemeSpec scheme = cfg.scheme();
    const auto zero = [](double) { return 0.0; };
    MeshConfig mesh{cfg.x_lo, cfg.x_hi, cfg.jump_x, l_max - l_jump, l_max};

    SnapshotResult result;
    FieldState jump = init_at_equilibrium(build_jump_mesh(mesh), scheme, problem.u0, zero);
    MeshConfig ref_mesh{cfg.x_lo, cfg.x_hi, cfg.jump_x, l_max, l_max};
    FieldState ref = init_at_equilibrium(build_uniform_mesh(ref_mesh, l_max), scheme, problem.u0, zero);
    for (double t : times) {
        run(jump, t);
        run(ref, t);
        detail::append_profile_block(result.jump_blocks, jump, t);
        detail::append_profile_block(result.ref_blocks, ref, t);
    }
    return result;
}

/// Flat key=value configuration file; '#' starts a comment. Unknown keys
/// are rejected.
inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    const auto parse_ints = [](const std::string& s) {
        std::vector<int> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
        return out;
    };
    const auto parse_doubles = [](const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        return out;
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        try {
            if (key == "lmax_min") cfg.lmax_lo = std::stoi(value);
            else if (key == "lmax_max") cfg.lmax_hi = std::stoi(value);
            else if (key == "ljump") cfg.l_jumps = parse_ints(value);
            else if (key == "lambda") cfg.lambda = std::stod(value);
            else if (key == "p") cfg.p = std::stod(value);
            else if (key == "c") cfg.c = std::stod(value);
            else if (key == "T") cfg.T = std::stod(value);
            else if (key == "x_lo") cfg.x_lo = std::stod(value);
            else if (key == "x_hi") cfg.x_hi = std::stod(value);
            else if (key == "jump_x") cfg.jump_x = std::stod(value);
            else if (key == "out") cfg.out_dir = value;
            else if (key == "snapshot_times") cfg.snapshot_times = parse_doubles(value);
            else
                throw std::runtime_error("unknown key '" + key + "'");
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": bad value for '" + key + "'");
        }
    }
    return cfg;
}

}  // namespace mrlbm
