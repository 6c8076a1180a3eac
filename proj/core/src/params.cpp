#include "crane3d/params.hpp"

#include <cmath>
#include <sstream>

#include "crane3d/errors.hpp"

namespace crane3d {

std::string CraneState::describe() const {
    std::ostringstream os;
    os << "x_t=" << x_t << " dx_t=" << dx_t << " y_t=" << y_t << " dy_t=" << dy_t
       << " L=" << L << " dL=" << dL << " alpha=" << alpha << " dalpha=" << dalpha
       << " beta=" << beta << " dbeta=" << dbeta;
    return os.str();
}

void CraneParams::validate() const {
    if (!(m_rail > 0) || !(m_trolley > 0))
        throw InvalidParameterError("rail and trolley masses must be positive");
    if (!(m_payload >= 0))
        throw InvalidParameterError("payload mass must be non-negative");
    if (!(gravity > 0)) throw InvalidParameterError("gravity must be positive");
    if (!(u_sat > 0)) throw InvalidParameterError("input saturation must be positive");
    for (Axis a : kAllAxes) {
        const AxisParams& ax = axis(a);
        if (!(ax.radius > 0))
            throw InvalidParameterError(std::string("pulley radius must be positive on axis ") +
                                        axis_name(a));
        if (!(ax.pos_min < ax.pos_max))
            throw InvalidParameterError(std::string("position limits must satisfy min < max on axis ") +
                                        axis_name(a));
        if (!(ax.gain > 0))
            throw InvalidParameterError(std::string("gain must be positive on axis ") + axis_name(a));
        if (ax.inertia < 0)
            throw InvalidParameterError(std::string("inertia must be non-negative on axis ") +
                                        axis_name(a));
        if (ax.friction.viscous_pos < 0 || ax.friction.viscous_neg < 0)
            throw InvalidParameterError(std::string("viscous coefficients must be non-negative on axis ") +
                                        axis_name(a));
    }
    if (m_payload == 0.0 && l.inertia <= 0.0)
        throw InvalidParameterError("rope axis needs positive inertia when no payload is attached");
    if (d_alpha < 0 || d_beta < 0)
        throw InvalidParameterError("swing damping must be non-negative");
}

AxisParams effective_axis_params(const MotorParams& motor, double pulley_radius,
                                 double pos_min, double pos_max,
                                 const std::optional<MechanicalFriction>& mech) {
    if (!(motor.resistance > 0))
        throw InvalidParameterError("motor resistance must be positive");
    if (!(motor.torque_const > 0))
        throw InvalidParameterError("motor torque constant must be positive");
    if (!(motor.gear_ratio > 0))
        throw InvalidParameterError("gear ratio must be positive");
    if (!(pulley_radius > 0))
        throw InvalidParameterError("pulley radius must be positive");

    const double rg = motor.gear_ratio;
    const double R = motor.resistance;
    const double Ra = pulley_radius;
    const double rg2_Ra2 = rg * rg / (Ra * Ra);

    AxisParams out;
    out.radius = Ra;
    out.pos_min = pos_min;
    out.pos_max = pos_max;
    out.inertia = rg2_Ra2 * motor.rotor_inertia;
    out.gain = rg * motor.torque_const / (R * Ra);

    const double visc_motor = motor.torque_const * motor.back_emf * rg * rg / (R * Ra * Ra) +
                              rg2_Ra2 * motor.viscous;
    const double coul_motor = rg / Ra * motor.coulomb;

    AxisFriction fr;
    if (mech) {
        fr.viscous_pos = visc_motor + mech->viscous_pos;
        fr.viscous_neg = visc_motor + mech->viscous_neg;
        fr.coulomb_pos = mech->coulomb_pos;
        fr.coulomb_neg = mech->coulomb_neg;
        fr.coulomb_pos.pos_min = fr.coulomb_neg.pos_min = pos_min;
        fr.coulomb_pos.pos_max = fr.coulomb_neg.pos_max = pos_max;
        fr.coulomb_pos.c[0] += coul_motor;
        fr.coulomb_neg.c[0] += coul_motor;
    } else {
        fr.viscous_pos = fr.viscous_neg = visc_motor;
        fr.coulomb_pos = Polynomial4::constant(coul_motor, pos_min, pos_max);
        fr.coulomb_neg = Polynomial4::constant(coul_motor, pos_min, pos_max);
    }
    out.friction = fr;
    return out;
}

double coulomb_force(const AxisFriction& f, double position, double direction) {
    if (direction > 0) return f.coulomb_pos.eval(position);
    if (direction < 0) return f.coulomb_neg.eval(position);
    return 0.0;
}

double viscous_force(const AxisFriction& f, double velocity) {
    if (velocity > 0) return f.viscous_pos * velocity;
    if (velocity < 0) return f.viscous_neg * velocity;
    return 0.0;
}

double friction_force(const AxisFriction& f, double position, double velocity,
                      double direction) {
    double visc;
    if (direction > 0)
        visc = f.viscous_pos * velocity;
    else if (direction < 0)
        visc = f.viscous_neg * velocity;
    else
        visc = 0.0;
    return visc + direction * coulomb_force(f, position, direction);
}

double friction_force_tanh(const AxisFriction& f, double position, double velocity,
                           double k) {
    const double coul = (velocity >= 0) ? f.coulomb_pos.eval(position)
                                        : f.coulomb_neg.eval(position);
    return viscous_force(f, velocity) + coul * std::tanh(k * velocity);
}

} // namespace crane3d
