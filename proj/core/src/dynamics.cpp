#include "crane3d/dynamics.hpp"

#include <cmath>

#include "crane3d/errors.hpp"

namespace crane3d {

namespace {

struct FrictionLaw {
    const ModeVector* mode = nullptr;  // hybrid when set
    double tanh_k = 0.0;               // smooth baseline otherwise
    std::array<bool, 3> frozen{false, false, false};

    bool held(Axis a) const {
        if (mode) return (*mode)[a] == Mode::Rest;
        return frozen[static_cast<int>(a)];
    }
    double force(Axis a, const AxisParams& ax, double pos, double v) const {
        if (mode) return friction_force(ax.friction, pos, v, mode_sign((*mode)[a]));
        return friction_force_tanh(ax.friction, pos, v, tanh_k);
    }
};

struct Geometry {
    double sa, ca, sb, cb;  // sin/cos of the swing angles
    double Sx, Sy;          // rope direction cosines toward the X and Y axes
};

Geometry geometry(const CraneState& s) {
    Geometry g;
    g.sa = std::sin(s.alpha);
    g.ca = std::cos(s.alpha);
    g.sb = std::sin(s.beta);
    g.cb = std::cos(s.beta);
    g.Sx = g.sa * g.sb;
    g.Sy = g.ca;
    return g;
}

// Non-acceleration part of the rope holding force: with the rope locked,
// f_hold = m_p Sx xacc + m_p Sy yacc + G.
double holding_bias(const CraneState& s, const CraneParams& p, const Geometry& g) {
    const double mp = p.m_payload;
    return -mp * s.L * (s.dalpha * s.dalpha + s.dbeta * s.dbeta * g.sa * g.sa) -
           p.gravity * mp * g.cb * g.sa;
}

struct Accels {
    double x = 0.0, y = 0.0, l = 0.0;
    double rope_force = 0.0;  // force entering the trolley couplings
};

// Solves the trolley accelerations given the per-axis net drive forces
// (drive minus own friction) and the rope regime. With the rope locked the
// holding reaction couples back into both trolley equations, which yields a
// small SPD system; otherwise the triangular solved form applies directly.
Accels solve_accels(const CraneState& s, const CraneParams& p, const Geometry& g,
                    bool x_held, bool y_held, bool l_held,
                    double Fx, double Fy, double Frope) {
    const double mp = p.m_payload;
    const double Mx = p.axis_mass(Axis::X);
    const double My = p.axis_mass(Axis::Y);
    Accels out;

    if (mp == 0.0) {
        // No payload: the rope transmits nothing and the pendulum is frozen.
        out.x = x_held ? 0.0 : Fx / Mx;
        out.y = y_held ? 0.0 : Fy / My;
        out.l = l_held ? 0.0 : Frope / p.l.inertia;
        out.rope_force = 0.0;
        return out;
    }

    if (!l_held) {
        const double f = Frope;
        out.x = x_held ? 0.0 : (Fx - f * g.Sx) / Mx;
        out.y = y_held ? 0.0 : (Fy - f * g.Sy) / My;
        const double G = holding_bias(s, p, g);
        out.l = (f - (mp * g.Sx * out.x + mp * g.Sy * out.y + G)) / (mp + p.l.inertia);
        out.rope_force = f;
        return out;
    }

    // Locked rope: impose zero rope acceleration and solve for the reaction.
    const double G = holding_bias(s, p, g);
    if (x_held && y_held) {
        out.x = out.y = 0.0;
    } else if (x_held) {
        out.x = 0.0;
        out.y = (Fy - g.Sy * G) / (My + mp * g.Sy * g.Sy);
    } else if (y_held) {
        out.y = 0.0;
        out.x = (Fx - g.Sx * G) / (Mx + mp * g.Sx * g.Sx);
    } else {
        const double a11 = Mx + mp * g.Sx * g.Sx;
        const double a22 = My + mp * g.Sy * g.Sy;
        const double a12 = mp * g.Sx * g.Sy;
        const double det = a11 * a22 - a12 * a12;
        const double b1 = Fx - g.Sx * G;
        const double b2 = Fy - g.Sy * G;
        out.x = (a22 * b1 - a12 * b2) / det;
        out.y = (a11 * b2 - a12 * b1) / det;
    }
    out.l = 0.0;
    out.rope_force = mp * g.Sx * out.x + mp * g.Sy * out.y + G;
    return out;
}

DynamicsResult evaluate(const CraneState& s, const InputVector& u,
                        const CraneParams& p, const FrictionLaw& law,
                        DynamicsDiagnostics* diag) {
    if (!s.finite()) throw InvalidStateError("non-finite state: " + s.describe());
    if (s.L < 0.5 * p.l.pos_min)
        throw InvalidStateError("rope length " + std::to_string(s.L) +
                                " below half the lower limit");

    const Geometry g = geometry(s);
    const double mp = p.m_payload;

    const bool xh = law.held(Axis::X);
    const bool yh = law.held(Axis::Y);
    const bool lh = law.held(Axis::L);

    const double Fx = p.x.gain * u.u_x - law.force(Axis::X, p.x, s.x_t, s.dx_t);
    const double Fy = p.y.gain * u.u_y - law.force(Axis::Y, p.y, s.y_t, s.dy_t);
    const double dbar_l = law.force(Axis::L, p.l, s.L, s.dL);
    const double Frope = p.l.gain * u.u_l - dbar_l;

    const Accels acc = solve_accels(s, p, g, xh, yh, lh, Fx, Fy, Frope);

    double alpha_acc = 0.0;
    double beta_acc = 0.0;
    if (mp > 0.0) {
        alpha_acc = (g.sa * acc.y - g.ca * g.sb * acc.x + p.gravity * g.ca * g.cb +
                     g.ca * g.sa * s.L * s.dbeta * s.dbeta - 2.0 * s.dL * s.dalpha) /
                        s.L -
                    p.d_alpha * s.dalpha / (mp * s.L * s.L);
        if (std::fabs(g.sa) < kSinAlphaSingular) {
            beta_acc = -p.d_beta * s.dbeta / (mp * s.L * s.L);
            if (diag) ++diag->beta_singular_evals;
        } else {
            beta_acc = (-p.gravity * g.sb - g.cb * acc.x - 2.0 * g.sa * s.dL * s.dbeta -
                        2.0 * g.ca * s.L * s.dalpha * s.dbeta) /
                           (g.sa * s.L) -
                       p.d_beta * s.dbeta / (mp * s.L * s.L);
        }
    }

    DynamicsResult out;
    out.acc_x = acc.x;
    out.acc_y = acc.y;
    out.acc_l = acc.l;
    out.rope_force = acc.rope_force;
    // Net force along the rope: drive minus whatever the constraint absorbs.
    // While slipping this equals (m_p + Jbar_l) * acc_l.
    out.t_rope = (mp + p.l.inertia) * acc.l +
                 (lh ? (p.l.gain * u.u_l - acc.rope_force) : 0.0);

    out.deriv[0] = xh ? 0.0 : s.dx_t;
    out.deriv[1] = acc.x;
    out.deriv[2] = yh ? 0.0 : s.dy_t;
    out.deriv[3] = acc.y;
    out.deriv[4] = lh ? 0.0 : s.dL;
    out.deriv[5] = acc.l;
    out.deriv[6] = mp > 0.0 ? s.dalpha : 0.0;
    out.deriv[7] = alpha_acc;
    out.deriv[8] = mp > 0.0 ? s.dbeta : 0.0;
    out.deriv[9] = beta_acc;
    return out;
}

} // namespace

std::array<double, 3> payload_position(const CraneState& s) {
    const double sa = std::sin(s.alpha), ca = std::cos(s.alpha);
    const double sb = std::sin(s.beta), cb = std::cos(s.beta);
    return {s.x_t + s.L * sb * sa, s.y_t + s.L * ca, -s.L * sa * cb};
}

DynamicsResult vector_field(const CraneState& s, const InputVector& u,
                            const ModeVector& mode, const CraneParams& p,
                            DynamicsDiagnostics* diag) {
    FrictionLaw law;
    law.mode = &mode;
    return evaluate(s, u, p, law, diag);
}

DynamicsResult vector_field_tanh(const CraneState& s, const InputVector& u,
                                 const CraneParams& p, double k,
                                 const std::array<bool, 3>& frozen,
                                 DynamicsDiagnostics* diag) {
    FrictionLaw law;
    law.tanh_k = k;
    law.frozen = frozen;
    return evaluate(s, u, p, law, diag);
}

double net_axis_force(Axis axis, const CraneState& s, const InputVector& u,
                      const ModeVector& mode, const CraneParams& p) {
    ModeVector m = mode;
    m[axis] = Mode::Rest;
    // A resting axis carries no friction of its own, so the guard force is
    // simply what the full dynamics would have to overcome.
    CraneState held = s;
    switch (axis) {
        case Axis::X: held.dx_t = 0.0; break;
        case Axis::Y: held.dy_t = 0.0; break;
        case Axis::L: held.dL = 0.0; break;
    }
    const DynamicsResult r = vector_field(held, u, m, p);
    const Geometry g = geometry(held);
    const double coupling = p.m_payload > 0.0 ? r.rope_force : 0.0;
    switch (axis) {
        case Axis::X: return p.x.gain * u.u_x - coupling * g.Sx;
        case Axis::Y: return p.y.gain * u.u_y - coupling * g.Sy;
        default: return r.t_rope;
    }
}

double mechanical_energy(const CraneState& s, const CraneParams& p) {
    const Geometry g = geometry(s);
    const double vpx = s.dx_t + s.dL * g.Sx +
                       s.L * (g.cb * s.dbeta * g.sa + g.sb * g.ca * s.dalpha);
    const double vpy = s.dy_t + s.dL * g.ca - s.L * g.sa * s.dalpha;
    const double vpz = -s.dL * g.sa * g.cb -
                       s.L * (g.ca * g.cb * s.dalpha - g.sa * g.sb * s.dbeta);
    const double T = 0.5 * (p.m_rail + p.m_trolley + p.x.inertia) * s.dx_t * s.dx_t +
                     0.5 * (p.m_trolley + p.y.inertia) * s.dy_t * s.dy_t +
                     0.5 * p.l.inertia * s.dL * s.dL +
                     0.5 * p.m_payload * (vpx * vpx + vpy * vpy + vpz * vpz);
    const double V = -p.m_payload * p.gravity * s.L * g.sa * g.cb;
    return T + V;
}

} // namespace crane3d
