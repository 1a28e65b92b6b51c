#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mrlbm/exact.hpp"
#include "mrlbm/mesh.hpp"
#include "mrlbm/multiresolution.hpp"

namespace mrlbm {

/// The six normalized L1 quantities of one (l_max, l_jump) configuration at
/// final time, plus the dyadic convergence rates against the previous l_max
/// when one exists.
struct ErrorReport {
    int l_max = 0;
    int l_jump = 0;
    double E_ref = 0.0;
    double E_coarse = 0.0;
    double D_coarse = 0.0;
    double E_jump = 0.0;
    double D_jump = 0.0;
    double D_jump_refl = 0.0;
    std::optional<double> rate_E_ref, rate_E_coarse, rate_D_coarse;
    std::optional<double> rate_E_jump, rate_D_jump, rate_D_jump_refl;
};

/// Discrete L1 norm sum_k dx |v_k|.
inline double l1_norm(std::span<const double> values, double dx) {
    double acc = 0.0;
    for (double v : values) acc += std::abs(v);
    return dx * acc;
}

/// ||u_exact(t, .)||_{1, dx} sampled at the level-`level` cell centers of
/// the grid's domain; the normalization shared by all metrics.
inline double exact_norm(const MultiLevelGrid& grid, const WaveProblem& problem, double t,
                         int level) {
    const std::int64_t lo = detail::aligned_index(grid.config().x_lo, level, "x_lo");
    const std::int64_t hi = detail::aligned_index(grid.config().x_hi, level, "x_hi");
    double acc = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) acc += std::abs(exact_u(problem, t, cell_center(level, k)));
    return std::ldexp(acc, -level);
}

/// Normalized L1 distance between the reconstructed u field and the exact
/// solution at time t, both on the uniform target-level grid.
inline double error_vs_exact(const MultiLevelGrid& grid, const LevelField& u_field,
                             const WaveProblem& problem, double t, int target_level) {
    const std::vector<double> rec = reconstruct(grid, u_field, target_level);
    const std::int64_t lo = detail::aligned_index(grid.config().x_lo, target_level, "x_lo");
    double acc = 0.0;
    for (std::size_t j = 0; j < rec.size(); ++j) {
        const double x = cell_center(target_level, lo + static_cast<std::int64_t>(j));
        acc += std::abs(rec[j] - exact_u(problem, t, x));
    }
    return std::ldexp(acc, -target_level) / exact_norm(grid, problem, t, target_level);
}

/// Normalized L1 distance between the reconstructed u field and a reference
/// solution already living on the uniform target-level grid.
inline double diff_vs_ref(const MultiLevelGrid& grid, const LevelField& u_field,
                          std::span<const double> ref_finest, const WaveProblem& problem,
                          double t, int target_level) {
    const std::vector<double> rec = reconstruct(grid, u_field, target_level);
    if (rec.size() != ref_finest.size())
        throw std::invalid_argument("diff_vs_ref: reference was computed at a different l_max");
    double acc = 0.0;
    for (std::size_t j = 0; j < rec.size(); ++j) acc += std::abs(rec[j] - ref_finest[j]);
    return std::ldexp(acc, -target_level) / exact_norm(grid, problem, t, target_level);
}

/// Normalized L1 norm of (u_jump - u_ref) restricted to the finest-level
/// cells contained in the left subdomain: the amplitude of the wave
/// reflected back from the interface. No reconstruction is involved; the
/// left subdomain must already sit at the finest level (cells touching the
/// interface from the left are inside the closed region and count).
inline double reflected_diff(const MultiLevelGrid& jump_grid, const LevelField& u_field,
                             std::span<const double> ref_finest, const WaveProblem& problem,
                             double t) {
    const LevelLayout& fine = jump_grid.level(jump_grid.level_count() - 1);
    if (fine.level != jump_grid.finest_level() || !fine.has_real_cells())
        throw std::invalid_argument("reflected_diff: left subdomain is not at the finest level");
    const std::int64_t origin = jump_grid.finest_origin();
    const std::int64_t jump = jump_grid.finest_jump_index();
    if (static_cast<std::int64_t>(ref_finest.size()) < jump - origin)
        throw std::invalid_argument("reflected_diff: reference was computed at a different l_max");
    const auto& values = u_field[jump_grid.level_count() - 1];
    double acc = 0.0;
    for (std::int64_t k = std::max(fine.real_lo, origin); k < std::min(fine.real_hi, jump); ++k)
        acc += std::abs(values[fine.index(k)] - ref_finest[static_cast<std::size_t>(k - origin)]);
    const int level = jump_grid.finest_level();
    return std::ldexp(acc, -level) / exact_norm(jump_grid, problem, t, level);
}

/// Dyadic convergence rates log2(v_{i-1} / v_i) of a sequence indexed by
/// increasing l_max.
inline std::vector<double> convergence_rates(std::span<const double> values) {
    if (values.size() < 2)
        throw std::invalid_argument("convergence_rates: needs at least two values");
    std::vector<double> rates;
    rates.reserve(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i - 1] > 0.0) || !(values[i] > 0.0))
            throw std::invalid_argument("convergence_rates: values must be positive");
        rates.push_back(std::log2(values[i - 1] / values[i]));
    }
    return rates;
}

}  // namespace mrlbm
