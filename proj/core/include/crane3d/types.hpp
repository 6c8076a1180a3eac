#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace crane3d {

/// The three actuated axes: the rail along X, the trolley along Y and the hoist rope.
enum class Axis : int { X = 0, Y = 1, L = 2 };

constexpr std::array<Axis, 3> kAllAxes{Axis::X, Axis::Y, Axis::L};

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        default: return "l";
    }
}

/// Per-axis motion regime. The numeric codes are the ones used in trajectory files.
enum class Mode : int { Neg = 1, Rest = 2, Pos = 3 };

inline int mode_code(Mode m) { return static_cast<int>(m); }

inline Mode mode_from_code(int c) {
    switch (c) {
        case 1: return Mode::Neg;
        case 2: return Mode::Rest;
        default: return Mode::Pos;
    }
}

/// Direction sign implied by a mode: -1, 0 or +1.
inline double mode_sign(Mode m) {
    switch (m) {
        case Mode::Neg: return -1.0;
        case Mode::Rest: return 0.0;
        default: return +1.0;
    }
}

/// Discrete mode of the full system, one regime per axis (27 combinations).
struct ModeVector {
    Mode x = Mode::Rest;
    Mode y = Mode::Rest;
    Mode l = Mode::Rest;

    Mode& operator[](Axis a) {
        switch (a) {
            case Axis::X: return x;
            case Axis::Y: return y;
            default: return l;
        }
    }
    Mode operator[](Axis a) const {
        switch (a) {
            case Axis::X: return x;
            case Axis::Y: return y;
            default: return l;
        }
    }
    bool operator==(const ModeVector&) const = default;
};

/// Continuous state: trolley position/velocity on both axes, rope length and
/// rate, and the two payload swing angles with their rates.
///
/// alpha is measured so that the payload hangs straight down at alpha = pi/2,
/// beta = 0; see payload_position() for the exact kinematics.
struct CraneState {
    double x_t = 0.0;    ///< rail position along X [m]
    double dx_t = 0.0;   ///< [m/s]
    double y_t = 0.0;    ///< trolley position along Y [m]
    double dy_t = 0.0;   ///< [m/s]
    double L = 0.5;      ///< rope length [m]
    double dL = 0.0;     ///< [m/s]
    double alpha = M_PI / 2;  ///< [rad]
    double dalpha = 0.0;      ///< [rad/s]
    double beta = 0.0;        ///< [rad]
    double dbeta = 0.0;       ///< [rad/s]

    static constexpr std::size_t kDim = 10;

    std::array<double, kDim> to_array() const {
        return {x_t, dx_t, y_t, dy_t, L, dL, alpha, dalpha, beta, dbeta};
    }
    static CraneState from_array(const std::array<double, kDim>& v) {
        CraneState s;
        s.x_t = v[0]; s.dx_t = v[1]; s.y_t = v[2]; s.dy_t = v[3];
        s.L = v[4]; s.dL = v[5]; s.alpha = v[6]; s.dalpha = v[7];
        s.beta = v[8]; s.dbeta = v[9];
        return s;
    }

    double position(Axis a) const {
        switch (a) {
            case Axis::X: return x_t;
            case Axis::Y: return y_t;
            default: return L;
        }
    }
    double velocity(Axis a) const {
        switch (a) {
            case Axis::X: return dx_t;
            case Axis::Y: return dy_t;
            default: return dL;
        }
    }

    bool finite() const {
        for (double v : to_array())
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const CraneState&) const = default;

    std::string describe() const;
};

/// Motor input voltages (or direct forces when the axis gain is 1).
struct InputVector {
    double u_x = 0.0;
    double u_y = 0.0;
    double u_l = 0.0;

    double operator[](Axis a) const {
        switch (a) {
            case Axis::X: return u_x;
            case Axis::Y: return u_y;
            default: return u_l;
        }
    }
    bool operator==(const InputVector&) const = default;
};

/// Time derivative of CraneState, in the same component order.
using StateDeriv = std::array<double, CraneState::kDim>;

} // namespace crane3d
