#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mrlbm/mesh.hpp"
#include "mrlbm/scheme.hpp"

namespace mrlbm {

/// Five-point transport stencil C_{gap, m}, m = -2..2 (index m + 2).
using TransportStencil = std::array<double, 5>;

/// Stencil weights for one whole-step advection by velocity c seen from a
/// cell `level_gap` levels coarser than the finest one. Base case moves by
/// one cell (C_{0,-c} = 1, C_{0,0} = -1; the two rules superpose to zero
/// for c = 0, so a resting population never streams); each extra level
/// applies the fixed 5x5 recursion matrix.
inline TransportStencil compute_weights(int c_alpha, int level_gap) {
    if (c_alpha < -1 || c_alpha > 1)
        throw std::invalid_argument(
            "compute_weights: |c| > 1 leaves the five-point stencil support");
    if (level_gap < 0) throw std::invalid_argument("compute_weights: negative level gap");

    TransportStencil c{0.0, 0.0, 0.0, 0.0, 0.0};
    c[static_cast<std::size_t>(-c_alpha + 2)] += 1.0;
    c[2] += -1.0;

    // Row m, column m' of the recursion, both running over -2..2.
    static constexpr double recursion[5][5] = {
        {0.0, -0.125, 0.0, 0.0, 0.0},
        {2.0, 1.125, 0.0, -0.125, 0.0},
        {0.0, 1.125, 2.0, 1.125, 0.0},
        {0.0, -0.125, 0.0, 1.125, 2.0},
        {0.0, 0.0, 0.0, -0.125, 0.0},
    };
    for (int it = 0; it < level_gap; ++it) {
        TransportStencil next{};
        for (int row = 0; row < 5; ++row) {
            double acc = 0.0;
            for (int col = 0; col < 5; ++col) acc += recursion[row][col] * c[col];
            next[row] = acc;
        }
        c = next;
    }
    return c;
}

/// Per-velocity stencils for every level gap up to max_gap.
struct TransportWeights {
    std::vector<std::vector<TransportStencil>> by_velocity;  // [alpha][gap]

    TransportWeights() = default;
    TransportWeights(const SchemeSpec& scheme, int max_gap) {
        by_velocity.resize(scheme.q());
        for (std::size_t a = 0; a < scheme.q(); ++a) {
            by_velocity[a].reserve(static_cast<std::size_t>(max_gap) + 1);
            for (int gap = 0; gap <= max_gap; ++gap)
                by_velocity[a].push_back(compute_weights(scheme.velocities()[a], gap));
        }
    }
};

struct ChildPair {
    double even;  // left child, center at parent - h/4
    double odd;   // right child, center at parent + h/4
};

/// Cell-average interpolation from a parent and its two neighbors; exact
/// for polynomials of degree <= 2 and average-preserving:
/// (even + odd) / 2 == parent.
inline ChildPair predict(double parent_left, double parent, double parent_right) {
    const double slope = 0.125 * (parent_left - parent_right);
    return {parent + slope, parent - slope};
}

/// Fine-to-coarse averaging; the exact inverse of predict on the parent.
inline double project(double even_child, double odd_child) {
    return 0.5 * (even_child + odd_child);
}

/// Per-level cell values over the stored windows of a grid, one scalar
/// component: field[level_idx][layout.index(k)].
using LevelField = std::vector<std::vector<double>>;

inline LevelField make_level_field(const MultiLevelGrid& grid) {
    LevelField f(grid.level_count());
    for (std::size_t i = 0; i < grid.level_count(); ++i)
        f[i].assign(static_cast<std::size_t>(grid.level(i).stored_size()), 0.0);
    return f;
}

/// Fill every ghost cell of `field` from the real-cell values: domain-end
/// ghosts copy their nearest real cell, ghosts underneath finer cells get
/// the average of their two children (fine to coarse), ghosts above coarser
/// cells get the interpolation from their parent triple (coarse to fine).
inline void update_ghosts(const MultiLevelGrid& grid, LevelField& field) {
    for (const CopyBand& band : grid.end_copies()) {
        const LevelLayout& l = grid.level(band.level_idx);
        const double v = field[band.level_idx][l.index(band.source_k)];
        for (std::int64_t k = band.ghost_lo; k < band.ghost_hi; ++k)
            field[band.level_idx][l.index(k)] = v;
    }
    for (const ProjectionBand& band : grid.projection_bands()) {
        const LevelLayout& l = grid.level(band.level_idx);
        const LevelLayout& lf = grid.level(band.level_idx + 1);
        auto& coarse = field[band.level_idx];
        const auto& fine = field[band.level_idx + 1];
        for (std::int64_t k = band.lo; k < band.hi; ++k)
            coarse[l.index(k)] = project(fine[lf.index(2 * k)], fine[lf.index(2 * k + 1)]);
    }
    for (const PredictionBand& band : grid.prediction_bands()) {
        const LevelLayout& l = grid.level(band.level_idx);
        const LevelLayout& lc = grid.level(band.level_idx - 1);
        auto& fine = field[band.level_idx];
        const auto& coarse = field[band.level_idx - 1];
        for (std::int64_t k = band.lo; k < band.hi; ++k) {
            const std::int64_t p = (k >= 0 ? k / 2 : (k - 1) / 2);
            const ChildPair children = predict(coarse[lc.index(p - 1)], coarse[lc.index(p)],
                                               coarse[lc.index(p + 1)]);
            fine[l.index(k)] = (k == 2 * p) ? children.even : children.odd;
        }
    }
}

namespace detail {

/// Average of all real finest-level descendants of cell (level, k) on a
/// jump grid; k must lie under the fine region.
inline double average_fine_descendants(const MultiLevelGrid& grid,
                                       std::span<const double> fine_real,
                                       int level, std::int64_t k) {
    const int shift = grid.finest_level() - level;
    const std::int64_t first = (k << shift) - grid.finest_origin();
    const std::int64_t n = std::int64_t{1} << shift;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) acc += fine_real[static_cast<std::size_t>(first + j)];
    return acc / static_cast<double>(n);
}

}  // namespace detail

/// Interpolate the leaf-cell field onto the uniform grid at target_level
/// (the double-hat reconstruction). Leaves already at target_level are
/// copied through; coarser leaves are refined by repeated prediction, with
/// the same ghost closure the solver uses: values underneath finer real
/// cells come from averaging, domain-end neighbors are copy-extrapolated.
/// Only the real-cell entries of `field` are read.
inline std::vector<double> reconstruct(const MultiLevelGrid& grid, const LevelField& field,
                                       int target_level) {
    const MeshConfig& cfg = grid.config();
    if (target_level < grid.finest_level() ||
        (grid.has_jump() && target_level != grid.finest_level()))
        throw std::invalid_argument("reconstruct: unsupported target level");

    const std::int64_t out_lo = detail::aligned_index(cfg.x_lo, target_level, "x_lo");
    const std::int64_t out_hi = detail::aligned_index(cfg.x_hi, target_level, "x_hi");
    std::vector<double> out(static_cast<std::size_t>(out_hi - out_lo), 0.0);

    // Copy any leaves already at the target level (the fine region, or the
    // whole domain when the grid is uniformly finest).
    std::span<const double> fine_real;
    for (std::size_t i = 0; i < grid.level_count(); ++i) {
        const LevelLayout& l = grid.level(i);
        if (l.level == target_level && l.has_real_cells()) {
            const auto& values = field[i];
            for (std::int64_t k = l.real_lo; k < l.real_hi; ++k)
                out[static_cast<std::size_t>(k - out_lo)] = values[l.index(k)];
            fine_real = std::span<const double>(values).subspan(
                l.index(l.real_lo), static_cast<std::size_t>(l.real_hi - l.real_lo));
        }
    }

    // Base of the pyramid: the coarsest level holding real cells not at the
    // target level.
    const LevelLayout& base = grid.level(0);
    if (base.level == target_level) return out;  // uniformly finest: identity

    const bool fine_left = grid.has_jump();
    std::int64_t lo = base.real_lo, hi = base.real_hi;  // region needing refinement
    std::vector<double> work(static_cast<std::size_t>(hi - lo) + 4);
    const auto& base_values = field[0];
    for (std::int64_t k = lo; k < hi; ++k)
        work[static_cast<std::size_t>(k - (lo - 2))] = base_values[base.index(k)];

    auto fill_margins = [&](std::vector<double>& w, int level, std::int64_t a, std::int64_t b) {
        // w covers [a - 2, b + 2); in-domain values [a, b) are already set.
        if (fine_left) {
            w[0] = detail::average_fine_descendants(grid, fine_real, level, a - 2);
            w[1] = detail::average_fine_descendants(grid, fine_real, level, a - 1);
        } else {
            w[0] = w[1] = w[2];
        }
        const double edge = w[static_cast<std::size_t>(b - a) + 1];
        w[static_cast<std::size_t>(b - a) + 2] = edge;
        w[static_cast<std::size_t>(b - a) + 3] = edge;
    };
    fill_margins(work, base.level, lo, hi);

    for (int level = base.level; level < target_level; ++level) {
        const std::int64_t next_lo = 2 * lo, next_hi = 2 * hi;
        std::vector<double> next(static_cast<std::size_t>(next_hi - next_lo) + 4);
        for (std::int64_t p = lo - 1; p < hi + 1; ++p) {
            const std::size_t pi = static_cast<std::size_t>(p - (lo - 2));
            const ChildPair c = predict(work[pi - 1], work[pi], work[pi + 1]);
            next[static_cast<std::size_t>(2 * p - (next_lo - 2))] = c.even;
            next[static_cast<std::size_t>(2 * p + 1 - (next_lo - 2))] = c.odd;
        }
        fill_margins(next, level + 1, next_lo, next_hi);
        work = std::move(next);
        lo = next_lo;
        hi = next_hi;
    }
    for (std::int64_t k = lo; k < hi; ++k)
        out[static_cast<std::size_t>(k - out_lo)] = work[static_cast<std::size_t>(k - (lo - 2))];
    return out;
}

}  // namespace mrlbm
