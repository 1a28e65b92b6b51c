#include <cmath>
#include <cstdint>
#include <functional>

#include "catch2/catch_amalgamated.hpp"
#include "mrlbm/mesh.hpp"
#include "mrlbm/multiresolution.hpp"
#include "support/oracles.hpp"

using namespace mrlbm;

namespace {

LevelField real_cells_filled(const MultiLevelGrid& g,
                             const std::function<double(int, std::int64_t)>& value) {
    LevelField f = make_level_field(g);
    for (std::size_t i = 0; i < g.level_count(); ++i) {
        const auto& l = g.level(i);
        for (std::int64_t k = l.real_lo; k < l.real_hi; ++k) f[i][l.index(k)] = value(l.level, k);
    }
    return f;
}

}  // namespace

TEST_CASE("transport weight base cases and first recursions") {
    SECTION("base case moves by one cell") {
        CHECK(compute_weights(1, 0) == TransportStencil{0.0, 1.0, -1.0, 0.0, 0.0});
        CHECK(compute_weights(-1, 0) == TransportStencil{0.0, 0.0, -1.0, 1.0, 0.0});
    }
    SECTION("resting population never streams") {
        for (int gap = 0; gap <= 5; ++gap)
            CHECK(compute_weights(0, gap) == TransportStencil{0.0, 0.0, 0.0, 0.0, 0.0});
    }
    SECTION("one recursion step") {
        CHECK(compute_weights(1, 1) ==
              TransportStencil{-0.125, 1.125, -0.875, -0.125, 0.0});
        CHECK(compute_weights(-1, 1) ==
              TransportStencil{0.0, -0.125, -0.875, 1.125, -0.125});
    }
    SECTION("two recursion steps") {
        CHECK(compute_weights(1, 2) ==
              TransportStencil{-9.0 / 64, 33.0 / 32, -5.0 / 8, -9.0 / 32, 1.0 / 64});
    }
    SECTION("rejects unsupported velocities and gaps") {
        CHECK_THROWS_AS(compute_weights(2, 1), std::invalid_argument);
        CHECK_THROWS_AS(compute_weights(-3, 0), std::invalid_argument);
        CHECK_THROWS_AS(compute_weights(1, -1), std::invalid_argument);
    }
}

TEST_CASE("transport weight invariants") {
    SECTION("weights sum to zero at every gap") {
        for (int c : {-1, 0, 1}) {
            for (int gap = 0; gap <= 8; ++gap) {
                const auto w = compute_weights(c, gap);
                // dyadic rationals with modest numerators: the sum is exact
                CHECK(w[0] + w[1] + w[2] + w[3] + w[4] == 0.0);
            }
        }
    }
    SECTION("opposite velocities mirror each other") {
        for (int gap = 0; gap <= 8; ++gap) {
            const auto plus = compute_weights(1, gap);
            const auto minus = compute_weights(-1, gap);
            for (int m = 0; m < 5; ++m) CHECK(plus[m] == minus[4 - m]);
        }
    }
    SECTION("weights match the predict/shift/project composition") {
        // the module's central oracle: Eq-style update weights and the
        // interpolation machinery must describe the same operator
        for (int c : {-1, 0, 1}) {
            for (int gap = 1; gap <= 5; ++gap) {
                const auto composed = oracles::composed_update_stencil(c, gap);
                const auto w = compute_weights(c, gap);
                const double scale = std::ldexp(1.0, -gap);
                CHECK(composed.leakage < 1e-14);
                for (int m = 0; m < 5; ++m)
                    CHECK(composed.update[m] == Catch::Approx(scale * w[m]).margin(1e-14));
            }
        }
    }
}

TEST_CASE("prediction and projection") {
    SECTION("constants reproduce") {
        const ChildPair c = predict(0.3, 0.3, 0.3);
        CHECK(c.even == 0.3);
        CHECK(c.odd == 0.3);
    }
    SECTION("symmetric neighbors cancel") {
        const ChildPair c = predict(0.0, 1.0, 0.0);
        CHECK(c.even == 1.0);
        CHECK(c.odd == 1.0);
    }
    SECTION("linear samples land on the child centers") {
        // parents at centers of level-2 cells 4,5,6 for g(x) = x
        const double h = 0.25;
        const ChildPair c = predict(cell_center(2, 4), cell_center(2, 5), cell_center(2, 6));
        CHECK(c.even == cell_center(2, 5) - h / 4);
        CHECK(c.odd == cell_center(2, 5) + h / 4);
        CHECK(c.even == cell_center(3, 10));
        CHECK(c.odd == cell_center(3, 11));
    }
    SECTION("quadratic cell averages are reproduced exactly") {
        for (std::int64_t k = 1; k < 23; ++k) {
            const auto avg = [&](int level, std::int64_t cell) {
                return oracles::quadratic_cell_average(level, cell, 2.0, -1.5, 0.25);
            };
            const ChildPair c = predict(avg(3, k - 1), avg(3, k), avg(3, k + 1));
            CHECK(c.even == Catch::Approx(avg(4, 2 * k)).epsilon(1e-13));
            CHECK(c.odd == Catch::Approx(avg(4, 2 * k + 1)).epsilon(1e-13));
        }
    }
    SECTION("projection averages") {
        CHECK(project(1.0, 3.0) == 2.0);
        CHECK(project(0.4, 0.4) == 0.4);
    }
    SECTION("projection undoes prediction") {
        CHECK(project(predict(0.75, 0.5, 0.25).even, predict(0.75, 0.5, 0.25).odd) == 0.5);
        const ChildPair c = predict(0.123456, 0.654321, -0.987654);
        CHECK(project(c.even, c.odd) == Catch::Approx(0.654321).margin(1e-15));
    }
}

TEST_CASE("ghost update") {
    SECTION("uniform mesh only copies the ends") {
        MeshConfig cfg{0.0, 3.0, 2.0, 3, 3};
        const auto g = build_uniform_mesh(cfg, 3);
        LevelField f = real_cells_filled(g, [](int l, std::int64_t k) {
            return cell_center(l, k);
        });
        update_ghosts(g, f);
        const auto& layout = g.level(0);
        CHECK(f[0][layout.index(-1)] == f[0][layout.index(0)]);
        CHECK(f[0][layout.index(-2)] == f[0][layout.index(0)]);
        CHECK(f[0][layout.index(24)] == f[0][layout.index(23)]);
        CHECK(f[0][layout.index(25)] == f[0][layout.index(23)]);
        for (std::int64_t k = 0; k < 24; ++k)
            CHECK(f[0][layout.index(k)] == cell_center(3, k));
    }
    SECTION("constant fields stay constant on every ghost") {
        for (int l_jump : {1, 2, 3, 4}) {
            MeshConfig cfg{0.0, 3.0, 2.0, 6 - l_jump, 6};
            const auto g = build_jump_mesh(cfg);
            LevelField f = real_cells_filled(g, [](int, std::int64_t) { return 0.7; });
            update_ghosts(g, f);
            for (std::size_t i = 0; i < g.level_count(); ++i)
                for (double v : f[i]) CHECK(v == 0.7);
        }
    }
    SECTION("linear data crosses the interface exactly") {
        MeshConfig cfg{0.0, 3.0, 2.0, 3, 6};
        const auto g = build_jump_mesh(cfg);
        LevelField f = real_cells_filled(g, [](int l, std::int64_t k) {
            return cell_center(l, k);
        });
        update_ghosts(g, f);
        // interface ghosts at every level sit at their own cell centers;
        // domain-end copies are excluded (they are constant extrapolations)
        for (const auto& band : g.projection_bands()) {
            const auto& l = g.level(band.level_idx);
            for (std::int64_t k = band.lo; k < band.hi; ++k)
                CHECK(f[band.level_idx][l.index(k)] ==
                      Catch::Approx(cell_center(l.level, k)).margin(1e-14));
        }
        for (const auto& band : g.prediction_bands()) {
            const auto& l = g.level(band.level_idx);
            for (std::int64_t k = band.lo; k < band.hi; ++k)
                CHECK(f[band.level_idx][l.index(k)] ==
                      Catch::Approx(cell_center(l.level, k)).margin(1e-14));
        }
    }
    SECTION("quadratic cell averages cross the interface exactly") {
        MeshConfig cfg{0.0, 3.0, 2.0, 2, 5};
        const auto g = build_jump_mesh(cfg);
        const auto avg = [](int l, std::int64_t k) {
            return oracles::quadratic_cell_average(l, k, 1.0, -2.0, 0.5);
        };
        LevelField f = real_cells_filled(g, avg);
        update_ghosts(g, f);
        for (const auto& band : g.projection_bands()) {
            const auto& l = g.level(band.level_idx);
            for (std::int64_t k = band.lo; k < band.hi; ++k)
                CHECK(f[band.level_idx][l.index(k)] ==
                      Catch::Approx(avg(l.level, k)).margin(1e-13));
        }
        for (const auto& band : g.prediction_bands()) {
            const auto& l = g.level(band.level_idx);
            for (std::int64_t k = band.lo; k < band.hi; ++k)
                CHECK(f[band.level_idx][l.index(k)] ==
                      Catch::Approx(avg(l.level, k)).margin(1e-13));
        }
    }
}

TEST_CASE("reconstruction to the finest level") {
    SECTION("identity on the uniform finest mesh") {
        MeshConfig cfg{0.0, 3.0, 2.0, 4, 4};
        const auto g = build_uniform_mesh(cfg, 4);
        LevelField f = real_cells_filled(g, [](int l, std::int64_t k) {
            return std::sin(static_cast<double>(k) + l);
        });
        const auto rec = reconstruct(g, f, 4);
        REQUIRE(rec.size() == 48);
        const auto& layout = g.level(0);
        for (std::int64_t k = 0; k < 48; ++k) CHECK(rec[k] == f[0][layout.index(k)]);
    }
    SECTION("constants reconstruct to constants") {
        MeshConfig cfg{0.0, 3.0, 2.0, 2, 6};
        const auto g = build_jump_mesh(cfg);
        LevelField f = real_cells_filled(g, [](int, std::int64_t) { return -1.25; });
        for (double v : reconstruct(g, f, 6)) CHECK(v == -1.25);
    }
    SECTION("linear samples reconstruct to the finest samples") {
        MeshConfig cfg{0.0, 3.0, 2.0, 3, 6};
        const auto g = build_jump_mesh(cfg);
        LevelField f = real_cells_filled(g, [](int l, std::int64_t k) {
            return 2.0 * cell_center(l, k) - 0.5;
        });
        const auto rec = reconstruct(g, f, 6);
        // the copy-extrapolated closure bends the last 2^(gap+1) cells at
        // the right domain end; everything else is exact
        for (std::size_t j = 0; j + 16 < rec.size(); ++j)
            CHECK(rec[j] ==
                  Catch::Approx(2.0 * cell_center(6, static_cast<std::int64_t>(j)) - 0.5)
                      .margin(1e-13));
    }
    SECTION("a coarse uniform grid reconstructs into a deeper hierarchy") {
        MeshConfig cfg{0.0, 3.0, 2.0, 3, 6};
        const auto g = build_uniform_mesh(cfg, 3);
        LevelField f = real_cells_filled(g, [](int l, std::int64_t k) {
            return 2.0 * cell_center(l, k) - 0.5;
        });
        const auto rec = reconstruct(g, f, 6);
        REQUIRE(rec.size() == 3u << 6);
        // linear data is exact away from the copy-extrapolated domain ends
        for (std::size_t j = 16; j + 16 < rec.size(); ++j)
            CHECK(rec[j] ==
                  Catch::Approx(2.0 * cell_center(6, static_cast<std::int64_t>(j)) - 0.5)
                      .margin(1e-13));
    }
    SECTION("quadratic averages reconstruct exactly across the jump") {
        MeshConfig cfg{0.0, 3.0, 2.0, 2, 5};
        const auto g = build_jump_mesh(cfg);
        const auto avg = [](int l, std::int64_t k) {
            return oracles::quadratic_cell_average(l, k, 1.0, 0.5, -0.25);
        };
        LevelField f = real_cells_filled(g, avg);
        const auto rec = reconstruct(g, f, 5);
        // exactness holds away from the right domain end (copy closure)
        for (std::size_t j = 0; j + 16 < rec.size(); ++j)
            CHECK(rec[j] == Catch::Approx(avg(5, static_cast<std::int64_t>(j))).margin(1e-13));
    }
}
