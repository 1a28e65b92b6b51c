#pragma once

#include <cmath>
#include <functional>

namespace mrlbm {

/// Gaussian pulse centered at x = 3/2: exp(-100 (x - 3/2)^2).
inline double gaussian_u0(double x) {
    const double d = x - 1.5;
    return std::exp(-100.0 * d * d);
}

/// Linear wave system dt u + dx v = 0, dt v + c^2 dx u = 0 on the real
/// line, started from u(0, .) = u0 and v(0, .) = 0.
struct WaveProblem {
    double wave_speed = 0.5;
    std::function<double(double)> u0 = gaussian_u0;
    double final_time = 1.5625;
};

/// d'Alembert solution: the pulse splits into two halves travelling at
/// +-c, u(t, x) = (u0(x - ct) + u0(x + ct)) / 2.
inline double exact_u(const WaveProblem& p, double t, double x) {
    return 0.5 * (p.u0(x - p.wave_speed * t) + p.u0(x + p.wave_speed * t));
}

/// Companion flux moment; v(t, x) = (c/2)(u0(x - ct) - u0(x + ct)) solves
/// both first-order equations with v(0, .) = 0.
inline double exact_v(const WaveProblem& p, double t, double x) {
    return 0.5 * p.wave_speed * (p.u0(x - p.wave_speed * t) - p.u0(x + p.wave_speed * t));
}

}  // namespace mrlbm
