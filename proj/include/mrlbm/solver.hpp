#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mrlbm/mesh.hpp"
#include "mrlbm/multiresolution.hpp"
#include "mrlbm/scheme.hpp"

namespace mrlbm {

/// Populations of one scheme on one grid, advancing in time with the
/// single global step dt = dx_finest / lambda. Double-buffered so the
/// stream phase has no intra-step ordering hazards. Confine one instance
/// to one thread; distinct instances may run concurrently.
class FieldState {
public:
    FieldState(MultiLevelGrid grid, SchemeSpec scheme)
        : grid_(std::move(grid)), scheme_(std::move(scheme)) {
        dt_ = grid_.dx_finest() / scheme_.lattice_velocity();
        const std::size_t q = scheme_.q();
        fields_.resize(q);
        back_.resize(q);
        for (std::size_t a = 0; a < q; ++a) {
            fields_[a] = make_level_field(grid_);
            back_[a] = make_level_field(grid_);
        }
        // Scaled stencils 2^-gap C_gap per velocity and stored level.
        scaled_.resize(q);
        for (std::size_t a = 0; a < q; ++a) {
            scaled_[a].resize(grid_.level_count());
            for (std::size_t i = 0; i < grid_.level_count(); ++i) {
                const int gap = grid_.finest_level() - grid_.level(i).level;
                TransportStencil w = compute_weights(scheme_.velocities()[a], gap);
                const double scale = std::ldexp(1.0, -gap);
                for (double& v : w) v *= scale;
                scaled_[a][i] = w;
            }
        }
        scratch_f_.resize(q);
        scratch_fs_.resize(q);
        scratch_m_.resize(q);
        scratch_ms_.resize(q);
        scratch_eq_.resize(q);
        scratch_cons_.resize(scheme_.conserved_count());
    }

    const MultiLevelGrid& grid() const { return grid_; }
    const SchemeSpec& scheme() const { return scheme_; }
    double dt() const { return dt_; }
    double time() const { return static_cast<double>(step_index_) * dt_; }
    std::int64_t step_index() const { return step_index_; }

    /// Population of velocity alpha at cell (level_idx, k).
    double value(std::size_t alpha, std::size_t level_idx, std::int64_t k) const {
        return fields_[alpha][level_idx][grid_.level(level_idx).index(k)];
    }
    double& value(std::size_t alpha, std::size_t level_idx, std::int64_t k) {
        return fields_[alpha][level_idx][grid_.level(level_idx).index(k)];
    }

    const LevelField& populations_of(std::size_t alpha) const { return fields_[alpha]; }

    /// Moment `slot` on every stored cell; only real-cell entries are
    /// meaningful (ghosts may be stale).
    LevelField moment_field(std::size_t slot) const {
        LevelField out = make_level_field(grid_);
        const std::size_t q = scheme_.q();
        for (std::size_t i = 0; i < grid_.level_count(); ++i) {
            const auto& layout = grid_.level(i);
            for (std::int64_t k = layout.real_lo; k < layout.real_hi; ++k) {
                double acc = 0.0;
                for (std::size_t j = 0; j < q; ++j)
                    acc += scheme_.moment_matrix(slot, j) * fields_[j][i][layout.index(k)];
                out[i][layout.index(k)] = acc;
            }
        }
        return out;
    }

    /// Moment `slot` on the real cells of the finest level, as a flat array
    /// starting at the domain origin. Requires the finest level to carry
    /// real cells (uniform-finest grids in particular).
    std::vector<double> finest_moment(std::size_t slot) const {
        const auto& layout = grid_.level(grid_.level_count() - 1);
        if (layout.level != grid_.finest_level() || !layout.has_real_cells())
            throw std::logic_error("finest_moment: grid has no real cells at the finest level");
        std::vector<double> out(static_cast<std::size_t>(layout.real_hi - layout.real_lo));
        const std::size_t q = scheme_.q();
        for (std::int64_t k = layout.real_lo; k < layout.real_hi; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < q; ++j)
                acc += scheme_.moment_matrix(slot, j) * fields_[j].back()[layout.index(k)];
            out[static_cast<std::size_t>(k - layout.real_lo)] = acc;
        }
        return out;
    }

    friend FieldState init_at_equilibrium(MultiLevelGrid grid, SchemeSpec scheme,
                                          const std::function<double(double)>& u0,
                                          const std::function<double(double)>& v0);
    friend void step(FieldState& state);

private:
    MultiLevelGrid grid_;
    SchemeSpec scheme_;
    double dt_ = 0.0;
    std::int64_t step_index_ = 0;
    std::vector<LevelField> fields_;  // [alpha][level_idx][cell]
    std::vector<LevelField> back_;
    std::vector<std::vector<TransportStencil>> scaled_;  // [alpha][level_idx]
    std::vector<double> scratch_f_, scratch_fs_, scratch_m_, scratch_ms_, scratch_eq_,
        scratch_cons_;
};

/// Sample u0, v0 at the real-cell centers and fill every leaf with the
/// corresponding equilibrium populations; t = 0. The scheme must conserve
/// exactly two moments.
inline FieldState init_at_equilibrium(MultiLevelGrid grid, SchemeSpec scheme,
                                      const std::function<double(double)>& u0,
                                      const std::function<double(double)>& v0) {
    if (scheme.conserved_count() != 2)
        throw std::invalid_argument("init_at_equilibrium: expects a two-moment scheme (u, v)");
    FieldState state(std::move(grid), std::move(scheme));
    const std::size_t q = state.scheme_.q();
    std::vector<double> conserved(2), eq(q), f(q);
    for (std::size_t i = 0; i < state.grid_.level_count(); ++i) {
        const auto& layout = state.grid_.level(i);
        for (std::int64_t k = layout.real_lo; k < layout.real_hi; ++k) {
            const double x = cell_center(layout.level, k);
            conserved[0] = u0(x);
            conserved[1] = v0(x);
            state.scheme_.equilibrium(conserved, eq);
            state.scheme_.populations_into(eq, f);
            for (std::size_t a = 0; a < q; ++a) state.fields_[a][i][layout.index(k)] = f[a];
        }
    }
    return state;
}

/// Advance by one global time step: collide every leaf, rebuild ghosts from
/// the post-collision values, then apply the five-point transport update
/// f_k += 2^-gap sum_m C_m f*_{k+m} per velocity. Throws on non-finite
/// values (instability).
inline void step(FieldState& state) {
    const MultiLevelGrid& grid = state.grid_;
    const SchemeSpec& scheme = state.scheme_;
    const std::size_t q = scheme.q();

    // Collision, in place: only leaves collide, ghosts receive reconstructed
    // post-collision values below.
    for (std::size_t i = 0; i < grid.level_count(); ++i) {
        const auto& layout = grid.level(i);
        if (!layout.has_real_cells()) continue;
        const std::size_t lo = layout.index(layout.real_lo);
        const std::size_t hi = layout.index(layout.real_hi);
        for (std::size_t idx = lo; idx < hi; ++idx) {
            for (std::size_t a = 0; a < q; ++a) state.scratch_f_[a] = state.fields_[a][i][idx];
            collide_into(scheme, state.scratch_f_, state.scratch_fs_, state.scratch_m_,
                         state.scratch_ms_, state.scratch_cons_, state.scratch_eq_);
            for (std::size_t a = 0; a < q; ++a) state.fields_[a][i][idx] = state.scratch_fs_[a];
        }
    }

    for (std::size_t a = 0; a < q; ++a) update_ghosts(grid, state.fields_[a]);

    double probe = 0.0;  // accumulates all streamed values; NaN/Inf propagate
    for (std::size_t a = 0; a < q; ++a) {
        for (std::size_t i = 0; i < grid.level_count(); ++i) {
            const auto& layout = grid.level(i);
            if (!layout.has_real_cells()) continue;
            const auto& src = state.fields_[a][i];
            auto& dst = state.back_[a][i];
            const TransportStencil& w = state.scaled_[a][i];
            const std::size_t lo = layout.index(layout.real_lo);
            const std::size_t hi = layout.index(layout.real_hi);
            if (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0 && w[3] == 0.0 && w[4] == 0.0) {
                for (std::size_t idx = lo; idx < hi; ++idx) {
                    dst[idx] = src[idx];
                    probe += src[idx];
                }
                continue;
            }
            for (std::size_t idx = lo; idx < hi; ++idx) {
                const double upd = w[0] * src[idx - 2] + w[1] * src[idx - 1] + w[2] * src[idx] +
                                   w[3] * src[idx + 1] + w[4] * src[idx + 2];
                const double v = src[idx] + upd;
                dst[idx] = v;
                probe += v;
            }
        }
    }
    if (!std::isfinite(probe))
        throw std::runtime_error("step: non-finite population value (unstable run)");

    std::swap(state.fields_, state.back_);
    ++state.step_index_;
}

/// Advance to time T (an exact multiple of dt) and optionally observe the
/// state after every step.
inline void run(FieldState& state, double final_time,
                const std::function<void(const FieldState&)>& monitor = nullptr) {
    const double dt = state.dt();
    const double n_real = final_time / dt;
    const auto n = static_cast<std::int64_t>(std::llround(n_real));
    if (n < 0 || std::abs(n_real - static_cast<double>(n)) > 1e-9)
        throw std::invalid_argument("run: final time is not a whole number of steps");
    if (n < state.step_index())
        throw std::invalid_argument("run: final time lies in the past of this state");
    while (state.step_index() < n) {
        step(state);
        if (monitor) monitor(state);
    }
}

/// Domain integral of conserved moment `slot`: sum over leaves of
/// 2^-level * m_slot. Exactly conserved by collide + stream up to round-off
/// and the (negligible) domain-end flux.
inline double total_conserved_moment(const FieldState& state, std::size_t slot) {
    const auto& grid = state.grid();
    const auto& scheme = state.scheme();
    if (slot >= scheme.conserved_count())
        throw std::invalid_argument("total_conserved_moment: not a conserved slot");
    const std::size_t moment_row = scheme.conserved_slots()[slot];
    double total = 0.0;
    for (std::size_t i = 0; i < grid.level_count(); ++i) {
        const auto& layout = grid.level(i);
        double level_sum = 0.0;
        for (std::int64_t k = layout.real_lo; k < layout.real_hi; ++k) {
            double m = 0.0;
            for (std::size_t j = 0; j < scheme.q(); ++j)
                m += scheme.moment_matrix(moment_row, j) * state.value(j, i, k);
            level_sum += m;
        }
        total += std::ldexp(level_sum, -layout.level);
    }
    return total;
}

}  // namespace mrlbm
