#pragma once

#include <array>
#include <optional>

#include "crane3d/types.hpp"

namespace crane3d {

/// Quartic polynomial used for position-dependent Coulomb friction maps.
/// Evaluation clamps the argument to [pos_min, pos_max]: quartics diverge
/// quickly outside the fitted range and the axes are physically bounded anyway.
struct Polynomial4 {
    std::array<double, 5> c{0, 0, 0, 0, 0};  ///< c[k] multiplies pos^k
    double pos_min = 0.0;
    double pos_max = 1.0;

    double eval(double pos) const {
        if (pos < pos_min) pos = pos_min;
        if (pos > pos_max) pos = pos_max;
        // Horner
        double r = c[4];
        r = r * pos + c[3];
        r = r * pos + c[2];
        r = r * pos + c[1];
        r = r * pos + c[0];
        return r;
    }

    static Polynomial4 constant(double value, double lo, double hi) {
        Polynomial4 p;
        p.c = {value, 0, 0, 0, 0};
        p.pos_min = lo;
        p.pos_max = hi;
        return p;
    }

    bool operator==(const Polynomial4&) const = default;
};

/// Direction-split effective friction of one axis, in force units.
///
/// The Coulomb maps store positive magnitudes; the sign is applied at the
/// point of use from the motion direction. The rope axis uses constant maps.
struct AxisFriction {
    double viscous_pos = 0.0;  ///< effective viscous coefficient for v > 0 [N s/m]
    double viscous_neg = 0.0;  ///< effective viscous coefficient for v < 0 [N s/m]
    Polynomial4 coulomb_pos;   ///< |Coulomb force| for v > 0, as a function of position [N]
    Polynomial4 coulomb_neg;   ///< |Coulomb force| for v < 0 [N]

    bool operator==(const AxisFriction&) const = default;
};

/// Raw DC motor constants, before reflection through gearbox and pulley.
/// Only used to build effective parameters; the simulator never integrates
/// motor current or shaft angle.
struct MotorParams {
    double resistance = 1.0;      ///< winding resistance R [ohm]
    double back_emf = 0.0;        ///< K_e [V s/rad]
    double torque_const = 1.0;    ///< K_p [N m/A]
    double rotor_inertia = 0.0;   ///< J [kg m^2]
    double viscous = 0.0;         ///< D_m [N m s/rad]
    double coulomb = 0.0;         ///< C_m [N m]
    double gear_ratio = 1.0;      ///< r_g
};

/// Everything the simulator needs about one linear axis.
struct AxisParams {
    double radius = 0.04;      ///< drive pulley radius [m]
    double pos_min = 0.0;
    double pos_max = 1.0;
    double gain = 1.0;         ///< effective voltage-to-force gain K [N/V]
    double inertia = 0.0;      ///< effective reflected inertia Jbar [kg]
    AxisFriction friction;
};

/// Complete parameter set of the crane plus drive train.
struct CraneParams {
    double m_rail = 2.2;      ///< rail mass, moves along X [kg]
    double m_trolley = 1.155; ///< trolley mass, moves along X and Y [kg]
    double m_payload = 0.457; ///< [kg]; 0 disables the pendulum
    double gravity = 9.81;    ///< [m/s^2]
    double u_sat = 12.0;      ///< input saturation [V]

    AxisParams x;
    AxisParams y;
    AxisParams l;

    double d_alpha = 0.0;  ///< swing damping on alpha [N m s]
    double d_beta = 0.0;   ///< swing damping on beta [N m s]

    const AxisParams& axis(Axis a) const {
        switch (a) {
            case Axis::X: return x;
            case Axis::Y: return y;
            default: return l;
        }
    }
    AxisParams& axis(Axis a) {
        switch (a) {
            case Axis::X: return x;
            case Axis::Y: return y;
            default: return l;
        }
    }

    /// Translational mass seen by an axis drive, motor inertia included.
    double axis_mass(Axis a) const {
        switch (a) {
            case Axis::X: return x.inertia + m_trolley + m_rail;
            case Axis::Y: return y.inertia + m_trolley;
            default: return l.inertia + m_payload;
        }
    }

    /// Throws InvalidParameterError if any invariant is violated.
    void validate() const;
};

/// Raw mechanical friction of one axis before motor effects are folded in.
struct MechanicalFriction {
    double viscous_pos = 0.0;
    double viscous_neg = 0.0;
    Polynomial4 coulomb_pos;
    Polynomial4 coulomb_neg;
};

/// Folds motor constants into the effective axis parameters:
///   Jbar = rg^2/R_axis^2 J,   K = rg Kp / (R R_axis),
///   Dbar(+-) = Kp Ke rg^2/(R R_axis^2) + rg^2/R_axis^2 Dm + D(+-),
///   Cbar(+-)(pos) = rg/R_axis Cm + C(+-)(pos).
/// `mech` may be omitted for the rope axis, whose own mechanical friction is
/// neglected and which carries only the reflected motor terms.
AxisParams effective_axis_params(const MotorParams& motor, double pulley_radius,
                                 double pos_min, double pos_max,
                                 const std::optional<MechanicalFriction>& mech);

/// Positive Coulomb magnitude for a direction (-1, 0, +1) at a position.
/// Returns 0 for direction 0.
double coulomb_force(const AxisFriction& f, double position, double direction);

/// Signed viscous force D(v) * v with the direction-matched coefficient.
double viscous_force(const AxisFriction& f, double velocity);

/// Signed total friction force for a given motion direction:
///   D(dir) v + dir * C(dir)(pos).
/// This is the dbar term that opposes the drive force in the axis equations.
double friction_force(const AxisFriction& f, double position, double velocity,
                      double direction);

/// Smooth friction used by the tanh baseline: D(sign v) v + C(sign v)(pos) tanh(k v).
double friction_force_tanh(const AxisFriction& f, double position, double velocity,
                           double k);

} // namespace crane3d
