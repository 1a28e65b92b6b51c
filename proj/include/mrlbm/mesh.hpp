#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrlbm {

/// Center of cell k at resolution level l. Cells at level l have width
/// 2^-l, so the center is 2^-l (k + 1/2). Computed by integer scaling;
/// exact for |2k + 1| < 2^53 and l <= 52.
inline double cell_center(int level, std::int64_t k) {
    return std::ldexp(static_cast<double>(2 * k + 1), -(level + 1));
}

/// Geometry of the computational domain and the resolution levels in play.
/// l_max is the finest level of the hierarchy and fixes the time step even
/// for grids whose leaves all sit on a coarser level.
struct MeshConfig {
    double x_lo = 0.0;
    double x_hi = 3.0;
    double jump_x = 2.0;  // interface abscissa for the jump topology
    int l_min = 0;
    int l_max = 0;
};

/// Stored cell window of one level. Cells [real_lo, real_hi) are leaves of
/// the mesh; the remaining stored cells are ghosts.
struct LevelLayout {
    int level = 0;
    std::int64_t stored_lo = 0;
    std::int64_t stored_hi = 0;  // exclusive
    std::int64_t real_lo = 0;
    std::int64_t real_hi = 0;  // exclusive; empty for purely-ghost levels

    std::int64_t stored_size() const { return stored_hi - stored_lo; }
    std::size_t index(std::int64_t k) const { return static_cast<std::size_t>(k - stored_lo); }
    bool has_real_cells() const { return real_hi > real_lo; }
};

// Ghost-fill work items precomputed at mesh construction.
struct CopyBand {
    std::size_t level_idx;
    std::int64_t ghost_lo, ghost_hi;  // cells to fill
    std::int64_t source_k;            // nearest real cell, copied verbatim
};
struct ProjectionBand {
    std::size_t level_idx;            // level l; sources are children at l+1
    std::int64_t lo, hi;
};
struct PredictionBand {
    std::size_t level_idx;            // level l; sources are parents at l-1
    std::int64_t lo, hi;
};

/// A 1D dyadic mesh covering [x_lo, x_hi] exactly once with leaf cells,
/// either uniformly at one level or with a fine-left/coarse-right jump at
/// jump_x. Ghost bands provide stencil closure at every stored level.
/// Immutable after construction.
class MultiLevelGrid {
public:
    const MeshConfig& config() const { return config_; }
    int finest_level() const { return finest_level_; }
    double dx_finest() const { return std::ldexp(1.0, -finest_level_); }
    bool has_jump() const { return has_jump_; }

    const std::vector<LevelLayout>& levels() const { return levels_; }
    const LevelLayout& level(std::size_t idx) const { return levels_[idx]; }
    std::size_t level_count() const { return levels_.size(); }

    const std::vector<CopyBand>& end_copies() const { return end_copies_; }
    /// Ordered fine-to-coarse: children are always filled before parents.
    const std::vector<ProjectionBand>& projection_bands() const { return projection_bands_; }
    /// Ordered coarse-to-fine: parents are always filled before children.
    const std::vector<PredictionBand>& prediction_bands() const { return prediction_bands_; }

    /// Leaf cell count over all levels.
    std::int64_t real_cell_count() const {
        std::int64_t n = 0;
        for (const auto& l : levels_) n += l.real_hi - l.real_lo;
        return n;
    }

    /// Index of the first finest-level cell of the domain (x_lo * 2^l_max).
    std::int64_t finest_origin() const { return finest_origin_; }
    /// Number of finest-level cells spanning the whole domain.
    std::int64_t finest_extent() const { return finest_extent_; }
    /// Finest-level index of the interface (jump_x * 2^l_max).
    std::int64_t finest_jump_index() const { return finest_jump_; }

    friend MultiLevelGrid build_uniform_mesh(const MeshConfig& config, int level);
    friend MultiLevelGrid build_jump_mesh(const MeshConfig& config);

private:
    MeshConfig config_;
    int finest_level_ = 0;
    bool has_jump_ = false;
    std::int64_t finest_origin_ = 0;
    std::int64_t finest_extent_ = 0;
    std::int64_t finest_jump_ = 0;
    std::vector<LevelLayout> levels_;  // ascending by level
    std::vector<CopyBand> end_copies_;
    std::vector<ProjectionBand> projection_bands_;
    std::vector<PredictionBand> prediction_bands_;
};

namespace detail {

/// x expressed in units of 2^-level cells; throws unless x is an exact
/// multiple of the cell width (within the exact-integer range of double).
inline std::int64_t aligned_index(double x, int level, const char* what) {
    const double scaled = std::ldexp(x, level);
    if (!(std::abs(scaled) < 9.0e15) || scaled != std::floor(scaled))
        throw std::invalid_argument(std::string(what) +
                                    " is not aligned with the level-" + std::to_string(level) +
                                    " cell boundaries");
    return static_cast<std::int64_t>(scaled);
}

inline void validate_levels(const MeshConfig& c) {
    if (c.l_min < 0 || c.l_max < c.l_min)
        throw std::invalid_argument("mesh: requires 0 <= l_min <= l_max");
    if (c.l_max > 52) throw std::invalid_argument("mesh: levels beyond 52 lose exactness");
    if (!(c.x_lo < c.x_hi)) throw std::invalid_argument("mesh: empty domain");
}

}  // namespace detail

/// Single-level mesh tiling the whole domain with level-`level` cells and a
/// two-cell copy-extrapolation ghost band at each end. `config.l_max` may
/// exceed `level`, in which case the grid advances with the finest-level
/// time step and transport weights for gap l_max - level.
inline MultiLevelGrid build_uniform_mesh(const MeshConfig& config, int level) {
    detail::validate_levels(config);
    if (level < 0 || level > config.l_max)
        throw std::invalid_argument("build_uniform_mesh: level must lie in [0, l_max]");
    const std::int64_t lo = detail::aligned_index(config.x_lo, level, "x_lo");
    const std::int64_t hi = detail::aligned_index(config.x_hi, level, "x_hi");
    if (hi - lo < 1) throw std::invalid_argument("build_uniform_mesh: domain has no cells");

    MultiLevelGrid g;
    g.config_ = config;
    g.finest_level_ = config.l_max;
    g.has_jump_ = false;
    g.finest_origin_ = lo << (config.l_max - level);
    g.finest_extent_ = (hi - lo) << (config.l_max - level);
    g.finest_jump_ = g.finest_origin_ + g.finest_extent_;  // no interface inside the domain
    g.levels_.push_back({level, lo - 2, hi + 2, lo, hi});
    g.end_copies_.push_back({0, lo - 2, lo, lo});
    g.end_copies_.push_back({0, hi, hi + 2, hi - 1});
    return g;
}

/// Two-region mesh: [x_lo, jump_x] at level l_max, [jump_x, x_hi] at level
/// l_min, plus the interface ghost bands every level in between needs so
/// that projection and prediction close. Degenerates to the uniform layout
/// when l_min == l_max.
inline MultiLevelGrid build_jump_mesh(const MeshConfig& config) {
    detail::validate_levels(config);
    if (!(config.x_lo < config.jump_x && config.jump_x < config.x_hi))
        throw std::invalid_argument("build_jump_mesh: jump_x must lie inside the domain");

    const int fine = config.l_max, coarse = config.l_min;
    // Alignment is required at the coarse level; finer levels follow.
    const std::int64_t lo_c = detail::aligned_index(config.x_lo, coarse, "x_lo");
    const std::int64_t hi_c = detail::aligned_index(config.x_hi, coarse, "x_hi");
    const std::int64_t jump_c = detail::aligned_index(config.jump_x, coarse, "jump_x");
    if (jump_c - lo_c < 2 || hi_c - jump_c < 2)
        throw std::invalid_argument(
            "build_jump_mesh: each side of the interface needs at least two coarse cells");

    if (fine == coarse) {
        MultiLevelGrid g = build_uniform_mesh(config, fine);
        g.finest_jump_ = jump_c;  // degenerate jump: keep the interface position
        return g;
    }

    MultiLevelGrid g;
    g.config_ = config;
    g.finest_level_ = fine;
    g.has_jump_ = true;
    g.finest_origin_ = lo_c << (fine - coarse);
    g.finest_extent_ = (hi_c - lo_c) << (fine - coarse);
    g.finest_jump_ = jump_c << (fine - coarse);

    // Coarse level: real cells right of the interface, a width-2 band of
    // ghosts under the fine region, copy ghosts at the domain end.
    g.levels_.push_back({coarse, jump_c - 2, hi_c + 2, jump_c, hi_c});
    // Intermediate levels carry only interface ghosts. The band under the
    // fine region doubles in width per level so that the two-child
    // averaging of pass 1 always finds both children one level below.
    for (int l = coarse + 1; l < fine; ++l) {
        const std::int64_t jump_l = jump_c << (l - coarse);
        const std::int64_t w = std::int64_t{1} << (l - coarse + 1);
        g.levels_.push_back({l, jump_l - w, jump_l + 2, 0, 0});
    }
    // Fine level: real cells left of the interface plus two predicted
    // ghosts over the coarse region.
    const std::int64_t lo_f = lo_c << (fine - coarse);
    const std::int64_t jump_f = jump_c << (fine - coarse);
    g.levels_.push_back({fine, lo_f - 2, jump_f + 2, lo_f, jump_f});

    const std::size_t coarse_idx = 0, fine_idx = g.levels_.size() - 1;
    g.end_copies_.push_back({fine_idx, lo_f - 2, lo_f, lo_f});
    g.end_copies_.push_back({coarse_idx, hi_c, hi_c + 2, hi_c - 1});
    for (std::size_t i = g.levels_.size() - 1; i-- > 0;) {
        const auto& lv = g.levels_[i];
        const std::int64_t jump_l = jump_c << (lv.level - coarse);
        g.projection_bands_.push_back({i, lv.stored_lo, jump_l});
    }
    for (std::size_t i = 1; i < g.levels_.size(); ++i) {
        const std::int64_t jump_l = jump_c << (g.levels_[i].level - coarse);
        g.prediction_bands_.push_back({i, jump_l, jump_l + 2});
    }
    return g;
}

}  // namespace mrlbm
