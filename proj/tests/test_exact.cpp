#include <cmath>

#include "catch2/catch_amalgamated.hpp"
#include "mrlbm/exact.hpp"
#include "mrlbm/mesh.hpp"
#include "mrlbm/metrics.hpp"

using namespace mrlbm;

TEST_CASE("gaussian initial datum") {
    CHECK(gaussian_u0(1.5) == 1.0);
    CHECK(gaussian_u0(1.6) == Catch::Approx(std::exp(-1.0)).margin(1e-12));
    CHECK(gaussian_u0(0.0) == Catch::Approx(0.0).margin(1e-90));  // e^-225
}

TEST_CASE("travelling wave solution") {
    const WaveProblem p;  // c = 1/2, gaussian, T = 1.5625

    SECTION("starts from the datum at rest") {
        for (double x : {0.0, 0.7, 1.5, 2.1, 3.0}) {
            CHECK(exact_u(p, 0.0, x) == Catch::Approx(gaussian_u0(x)).margin(1e-16));
            CHECK(exact_v(p, 0.0, x) == 0.0);
        }
    }
    SECTION("right-moving half pulse at the final time") {
        const double x_peak = 1.5 + p.wave_speed * p.final_time;  // 2.28125
        CHECK(exact_u(p, p.final_time, x_peak) == Catch::Approx(0.5).margin(1e-15));
        CHECK(exact_v(p, p.final_time, x_peak) == Catch::Approx(0.25).margin(1e-15));
    }
    SECTION("even symmetry about the pulse center") {
        for (double d : {0.1, 0.4, 0.9}) {
            CHECK(exact_u(p, 0.8, 1.5 + d) ==
                  Catch::Approx(exact_u(p, 0.8, 1.5 - d)).margin(1e-16));
            CHECK(exact_v(p, 0.8, 1.5) == 0.0);
        }
    }
}

TEST_CASE("solution satisfies the first-order system") {
    const WaveProblem p;
    const double c2 = p.wave_speed * p.wave_speed;
    const auto residuals = [&](double t, double x, double h) {
        const double du_dt = (exact_u(p, t + h, x) - exact_u(p, t - h, x)) / (2 * h);
        const double dv_dx = (exact_v(p, t, x + h) - exact_v(p, t, x - h)) / (2 * h);
        const double dv_dt = (exact_v(p, t + h, x) - exact_v(p, t - h, x)) / (2 * h);
        const double du_dx = (exact_u(p, t, x + h) - exact_u(p, t, x - h)) / (2 * h);
        return std::pair{du_dt + dv_dx, dv_dt + c2 * du_dx};
    };
    for (double t : {0.3, 0.9, 1.4}) {
        for (double x : {1.2, 1.4, 1.55, 1.7, 2.0}) {
            const auto [r1a, r1b] = residuals(t, x, 1e-2);
            const auto [r2a, r2b] = residuals(t, x, 1e-3);
            // central differences converge at second order: shrinking h by
            // 10 should shrink the residual by about 100
            if (std::abs(r1a) > 1e-8) CHECK(std::abs(r2a) < std::abs(r1a) / 20.0);
            if (std::abs(r1b) > 1e-8) CHECK(std::abs(r2b) < std::abs(r1b) / 20.0);
            CHECK(std::abs(r2a) < 1e-3);
            CHECK(std::abs(r2b) < 1e-3);
        }
    }
}

TEST_CASE("pulse mass is carried unchanged") {
    const WaveProblem p;
    const int level = 10;
    const auto sampled_norm = [&](double t) {
        std::vector<double> v(std::size_t{3} << level);
        for (std::size_t k = 0; k < v.size(); ++k)
            v[k] = exact_u(p, t, cell_center(level, static_cast<std::int64_t>(k)));
        return l1_norm(v, std::ldexp(1.0, -level));
    };
    const double at0 = sampled_norm(0.0);
    CHECK(at0 == Catch::Approx(0.17724538509).margin(1e-7));  // sqrt(pi)/10
    for (double t : {0.5, 1.0, 1.5625})
        CHECK(sampled_norm(t) == Catch::Approx(at0).epsilon(1e-10));
}
