#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mrlbm {

/// Moment-space lattice Boltzmann scheme description.
///
/// A scheme is defined by q integer velocities c_alpha (physical velocities
/// are lambda * c_alpha), an invertible q x q moment matrix M, a diagonal
/// relaxation vector s and an equilibrium closure mapping the conserved
/// moments to a full moment vector. Conserved moments are exactly the slots
/// with s == 0; they pass through collisions untouched.
///
/// Immutable after construction; safe to share across threads.
class SchemeSpec {
public:
    using EquilibriumFn =
        std::function<void(std::span<const double> conserved, std::span<double> moments_eq)>;

    SchemeSpec(std::vector<int> velocities,
               double lattice_velocity,
               std::vector<double> moment_matrix,  // row-major q x q
               std::vector<double> relaxation,
               std::size_t conserved_count,
               EquilibriumFn equilibrium)
        : velocities_(std::move(velocities)),
          lattice_velocity_(lattice_velocity),
          m_(std::move(moment_matrix)),
          s_(std::move(relaxation)),
          conserved_count_(conserved_count),
          equilibrium_(std::move(equilibrium)) {
        q_ = velocities_.size();
        if (q_ == 0) throw std::invalid_argument("SchemeSpec: needs at least one velocity");
        if (lattice_velocity_ <= 0.0)
            throw std::invalid_argument("SchemeSpec: lattice velocity must be positive");
        if (m_.size() != q_ * q_)
            throw std::invalid_argument("SchemeSpec: moment matrix must be q x q");
        if (s_.size() != q_)
            throw std::invalid_argument("SchemeSpec: relaxation vector must have length q");
        if (!equilibrium_) throw std::invalid_argument("SchemeSpec: missing equilibrium map");

        for (std::size_t i = 0; i < q_; ++i) {
            if (s_[i] == 0.0) {
                conserved_slots_.push_back(i);
            } else if (!(s_[i] > 0.0 && s_[i] <= 2.0)) {
                throw std::invalid_argument("SchemeSpec: relaxation rates must lie in (0, 2]");
            }
        }
        if (conserved_slots_.size() != conserved_count_)
            throw std::invalid_argument(
                "SchemeSpec: conserved_count does not match the number of zero relaxation rates");

        m_inv_ = invert(m_, q_);
        check_equilibrium_identity();
    }

    std::size_t q() const { return q_; }
    const std::vector<int>& velocities() const { return velocities_; }
    double lattice_velocity() const { return lattice_velocity_; }
    std::size_t conserved_count() const { return conserved_count_; }
    const std::vector<std::size_t>& conserved_slots() const { return conserved_slots_; }
    const std::vector<double>& relaxation() const { return s_; }

    double moment_matrix(std::size_t row, std::size_t col) const { return m_[row * q_ + col]; }
    double inverse_moment_matrix(std::size_t row, std::size_t col) const {
        return m_inv_[row * q_ + col];
    }

    void equilibrium(std::span<const double> conserved, std::span<double> moments_eq) const {
        equilibrium_(conserved, moments_eq);
    }

    /// m = M f
    void moments_into(std::span<const double> f, std::span<double> m) const {
        matvec(m_, f, m);
    }

    /// f = M^{-1} m (inverse is precomputed at construction)
    void populations_into(std::span<const double> m, std::span<double> f) const {
        matvec(m_inv_, m, f);
    }

    /// Diagonal relaxation in moment space. Conserved slots are copied, the
    /// others move toward equilibrium by their rate: m + s (m_eq - m). At
    /// equilibrium the increment vanishes exactly.
    void relax_moments_into(std::span<const double> m, std::span<double> m_star,
                            std::span<double> scratch_conserved,
                            std::span<double> scratch_eq) const {
        for (std::size_t j = 0; j < conserved_count_; ++j)
            scratch_conserved[j] = m[conserved_slots_[j]];
        equilibrium_(scratch_conserved.first(conserved_count_), scratch_eq.first(q_));
        for (std::size_t i = 0; i < q_; ++i) {
            const double s = s_[i];
            m_star[i] = (s == 0.0) ? m[i] : m[i] + s * (scratch_eq[i] - m[i]);
        }
    }

private:
    void matvec(const std::vector<double>& a, std::span<const double> x,
                std::span<double> y) const {
        if (x.size() != q_ || y.size() != q_)
            throw std::invalid_argument("SchemeSpec: vector length does not match q");
        for (std::size_t i = 0; i < q_; ++i) {
            double acc = 0.0;
            const double* row = a.data() + i * q_;
            for (std::size_t j = 0; j < q_; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
    }

    static std::vector<double> invert(const std::vector<double>& a, std::size_t n) {
        if (n == 3) return invert3(a);
        // Gauss-Jordan with partial pivoting on [A | I].
        std::vector<double> aug(n * 2 * n, 0.0);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                aug[i * 2 * n + j] = a[i * n + j];
                scale = std::max(scale, std::abs(a[i * n + j]));
            }
            aug[i * 2 * n + n + i] = 1.0;
        }
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(aug[r * 2 * n + col]) > std::abs(aug[piv * 2 * n + col])) piv = r;
            const double p = aug[piv * 2 * n + col];
            if (std::abs(p) <= 1e-12 * scale)
                throw std::invalid_argument("SchemeSpec: moment matrix is singular");
            if (piv != col)
                for (std::size_t j = 0; j < 2 * n; ++j)
                    std::swap(aug[piv * 2 * n + j], aug[col * 2 * n + j]);
            for (std::size_t j = 0; j < 2 * n; ++j) aug[col * 2 * n + j] /= p;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col) continue;
                const double f = aug[r * 2 * n + col];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < 2 * n; ++j)
                    aug[r * 2 * n + j] -= f * aug[col * 2 * n + j];
            }
        }
        std::vector<double> inv(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) inv[i * n + j] = aug[i * 2 * n + n + j];
        return inv;
    }

    static std::vector<double> invert3(const std::vector<double>& a) {
        const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) -
                           a[1] * (a[3] * a[8] - a[5] * a[6]) +
                           a[2] * (a[3] * a[7] - a[4] * a[6]);
        double scale = 0.0;
        for (double v : a) scale = std::max(scale, std::abs(v));
        if (std::abs(det) <= 1e-12 * scale * scale * scale)
            throw std::invalid_argument("SchemeSpec: moment matrix is singular");
        return {(a[4] * a[8] - a[5] * a[7]) / det, (a[2] * a[7] - a[1] * a[8]) / det,
                (a[1] * a[5] - a[2] * a[4]) / det, (a[5] * a[6] - a[3] * a[8]) / det,
                (a[0] * a[8] - a[2] * a[6]) / det, (a[2] * a[3] - a[0] * a[5]) / det,
                (a[3] * a[7] - a[4] * a[6]) / det, (a[1] * a[6] - a[0] * a[7]) / det,
                (a[0] * a[4] - a[1] * a[3]) / det};
    }

    // The equilibrium map must return the conserved moments unchanged in
    // their own slots; probe it on two sample inputs.
    void check_equilibrium_identity() const {
        std::vector<double> conserved(conserved_count_), eq(q_);
        for (int probe = 0; probe < 2; ++probe) {
            for (std::size_t j = 0; j < conserved_count_; ++j)
                conserved[j] = probe == 0 ? 0.0 : 1.0 - 0.5 * static_cast<double>(j);
            equilibrium_(conserved, eq);
            for (std::size_t j = 0; j < conserved_count_; ++j)
                if (eq[conserved_slots_[j]] != conserved[j])
                    throw std::invalid_argument(
                        "SchemeSpec: equilibrium must return conserved moments unchanged");
        }
    }

    std::vector<int> velocities_;
    double lattice_velocity_;
    std::vector<double> m_;
    std::vector<double> m_inv_;
    std::vector<double> s_;
    std::size_t conserved_count_;
    std::size_t q_ = 0;
    std::vector<std::size_t> conserved_slots_;
    EquilibriumFn equilibrium_;
};

inline std::vector<double> moments(const SchemeSpec& spec, std::span<const double> f) {
    std::vector<double> m(spec.q());
    spec.moments_into(f, m);
    return m;
}

inline std::vector<double> populations(const SchemeSpec& spec, std::span<const double> m) {
    std::vector<double> f(spec.q());
    spec.populations_into(m, f);
    return f;
}

/// In-place collision kernel used by the solver hot loop. All spans have
/// length q except scratch_conserved (length q_c).
inline void collide_into(const SchemeSpec& spec, std::span<const double> f,
                         std::span<double> f_star, std::span<double> scratch_m,
                         std::span<double> scratch_m_star, std::span<double> scratch_conserved,
                         std::span<double> scratch_eq) {
    spec.moments_into(f, scratch_m);
    spec.relax_moments_into(scratch_m, scratch_m_star, scratch_conserved, scratch_eq);
    spec.populations_into(scratch_m_star, f_star);
}

inline std::vector<double> collide(const SchemeSpec& spec, std::span<const double> f) {
    const std::size_t q = spec.q();
    std::vector<double> f_star(q), m(q), m_star(q), cons(spec.conserved_count()), eq(q);
    collide_into(spec, f, f_star, m, m_star, cons, eq);
    return f_star;
}

/// Populations realizing the equilibrium state for the given conserved moments.
inline std::vector<double> equilibrium_populations(const SchemeSpec& spec,
                                                   std::span<const double> conserved) {
    if (conserved.size() != spec.conserved_count())
        throw std::invalid_argument("equilibrium_populations: wrong number of conserved moments");
    std::vector<double> eq(spec.q());
    spec.equilibrium(conserved, eq);
    return populations(spec, eq);
}

/// Three-velocity scheme for the linear wave equation written as the first
/// order system dt u + dx v = 0, dt v + c^2 dx u = 0. Conserved moments are
/// u and v; the third moment relaxes at rate p toward (c^2/2) u.
inline SchemeSpec d1q3_wave_scheme(double wave_speed, double lattice_velocity,
                                   double relaxation_rate) {
    if (!(lattice_velocity > 0.0))
        throw std::invalid_argument("d1q3_wave_scheme: lattice velocity must be positive");
    if (!(wave_speed > 0.0 && wave_speed < lattice_velocity))
        throw std::invalid_argument("d1q3_wave_scheme: needs 0 < c < lambda (acoustic CFL)");
    if (!(relaxation_rate > 0.0 && relaxation_rate <= 2.0))
        throw std::invalid_argument("d1q3_wave_scheme: relaxation rate must lie in (0, 2]");

    const double lam = lattice_velocity;
    const double half_c2 = 0.5 * wave_speed * wave_speed;
    std::vector<double> m = {1.0, 1.0, 1.0,                              //
                             0.0, lam, -lam,                             //
                             0.0, 0.5 * lam * lam, 0.5 * lam * lam};
    return SchemeSpec({0, 1, -1}, lam, std::move(m), {0.0, 0.0, relaxation_rate}, 2,
                      [half_c2](std::span<const double> conserved, std::span<double> eq) {
                          eq[0] = conserved[0];
                          eq[1] = conserved[1];
                          eq[2] = half_c2 * conserved[0];
                      });
}

}  // namespace mrlbm
