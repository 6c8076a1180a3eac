#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace crane3d {

/// Dormand-Prince 5(4) embedded pair with FSAL and cubic Hermite dense output.
///
/// The stepper is deliberately minimal: the hybrid simulation layer owns the
/// time loop, event localization and output sampling, and only needs
/// try_step() plus interpolation over the last accepted interval.
template <std::size_t N>
class Rk45 {
public:
    using Vec = std::array<double, N>;

    struct Attempt {
        bool accepted = false;
        double error_norm = 0.0;   ///< scaled error of the attempted step
        std::size_t worst_index = 0;  ///< component dominating the error
    };

    double rel_tol = 1e-8;
    double abs_tol = 1e-10;

    /// Attempts one step of size h from (t, y). On acceptance the interval
    /// [t, t+h] becomes available for dense evaluation and y/f are advanced.
    /// `rhs(t, y, dydt)` evaluates the vector field.
    template <class Rhs>
    Attempt try_step(Rhs&& rhs, double t, const Vec& y, const Vec& f0, double h,
                     Vec& y_out, Vec& f_out) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                                e3 = 500.0 / 1113 - 7571.0 / 16695,
                                e4 = 125.0 / 192 - 393.0 / 640,
                                e5 = -2187.0 / 6784 + 92097.0 / 339200,
                                e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

        Vec k2, k3, k4, k5, k6, yt;
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * f0[i];
        rhs(t + h / 5, yt, k2);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a31 * f0[i] + a32 * k2[i]);
        rhs(t + 3 * h / 10, yt, k3);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a41 * f0[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + 4 * h / 5, yt, k4);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * f0[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + 8 * h / 9, yt, k5);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * f0[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                a65 * k5[i]);
        rhs(t + h, yt, k6);
        for (std::size_t i = 0; i < N; ++i)
            y_out[i] = y[i] + h * (b1 * f0[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                   b6 * k6[i]);
        rhs(t + h, y_out, f_out);  // FSAL stage, reused as f0 of the next step

        Attempt res;
        double err2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * f0[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * f_out[i]);
            const double scale =
                abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(y_out[i]));
            const double r2 = (e / scale) * (e / scale);
            if (r2 > err2) {
                err2 = r2;
                res.worst_index = i;
            }
        }
        res.error_norm = std::sqrt(err2);
        res.accepted = res.error_norm <= 1.0;
        return res;
    }

    /// Step size update from the last error norm (PI-free elementary controller).
    static double next_step(double h, double error_norm) {
        if (error_norm <= std::numeric_limits<double>::min())
            return h * 5.0;
        const double factor =
            std::clamp(0.9 * std::pow(error_norm, -0.2), 0.2, 5.0);
        return h * factor;
    }

    /// Cubic Hermite interpolation on an accepted interval.
    static void interpolate(double t0, double h, const Vec& y0, const Vec& f0,
                            const Vec& y1, const Vec& f1, double t, Vec& out) {
        const double th = (t - t0) / h;
        const double th2 = th * th;
        const double th3 = th2 * th;
        const double h00 = 2 * th3 - 3 * th2 + 1;
        const double h10 = th3 - 2 * th2 + th;
        const double h01 = -2 * th3 + 3 * th2;
        const double h11 = th3 - th2;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
    }
};

} // namespace crane3d
