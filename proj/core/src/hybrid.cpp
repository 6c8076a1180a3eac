#include "crane3d/hybrid.hpp"

#include <algorithm>
#include <cmath>

#include "crane3d/errors.hpp"
#include "crane3d/rk45.hpp"

namespace crane3d {

namespace {

constexpr int kChainBudget = 3;
constexpr double kTimeEps = 1e-14;

int idx(Axis a) { return static_cast<int>(a); }

const char* component_name(std::size_t i) {
    static const char* names[] = {"x_t", "dx_t", "y_t", "dy_t", "L",
                                  "dL",  "alpha", "dalpha", "beta", "dbeta"};
    return names[i];
}

void set_velocity(CraneState& s, Axis a, double v) {
    switch (a) {
        case Axis::X: s.dx_t = v; break;
        case Axis::Y: s.dy_t = v; break;
        case Axis::L: s.dL = v; break;
    }
}

void set_position(CraneState& s, Axis a, double pos) {
    switch (a) {
        case Axis::X: s.x_t = pos; break;
        case Axis::Y: s.y_t = pos; break;
        case Axis::L: s.L = pos; break;
    }
}

// Breakaway check for one resting axis; netF is the force the guard compares
// against the static Coulomb level. Breakaway toward a limit the axis is
// already parked at is suppressed.
std::optional<GuardHit> breakaway_hit(Axis a, double pos, double netF,
                                      const AxisParams& ax) {
    const bool at_max = pos >= ax.pos_max;
    const bool at_min = pos <= ax.pos_min;
    if (!at_max && netF > ax.friction.coulomb_pos.eval(pos))
        return GuardHit{a, GuardKind::BreakawayPos, netF};
    if (!at_min && -netF > ax.friction.coulomb_neg.eval(pos))
        return GuardHit{a, GuardKind::BreakawayNeg, netF};
    return std::nullopt;
}

// Settles all same-instant chained transitions after an event (or at t = 0).
// Only breakaways can newly fire here: an axis that just entered Rest may
// slip straight through if the net force already exceeds the threshold.
void settle_modes(CraneState& s, ModeVector& mode, double t, const InputVector& u,
                  const CraneParams& p, const std::array<bool, 3>& frozen,
                  std::array<int, 3>& counts, std::vector<GuardEvent>& log) {
    for (;;) {
        bool changed = false;
        for (Axis a : kAllAxes) {
            if (frozen[idx(a)]) continue;
            if (mode[a] != Mode::Rest) continue;
            const double netF = net_axis_force(a, s, u, mode, p);
            const auto hit = breakaway_hit(a, s.position(a), netF, p.axis(a));
            if (!hit) continue;
            if (++counts[idx(a)] > kChainBudget)
                throw ChatteringError(
                    std::string("chattering on axis ") + axis_name(a) + " at t=" +
                    std::to_string(t) + "; state: " + s.describe());
            GuardEvent ev;
            ev.time = t;
            ev.axis = a;
            ev.kind = hit->kind;
            ev.pre_mode = mode;
            ev.guard_value = hit->value;
            apply_transition(*hit, s, mode, p);
            ev.post_mode = mode;
            log.push_back(ev);
            changed = true;
        }
        if (!changed) return;
    }
}

using Vec = std::array<double, CraneState::kDim>;

// Interpolated state plus the drive command at one probe time.
struct GuardProbe {
    CraneState s;
    InputVector u;
};

struct StepScanner {
    const CraneParams& p;
    const InputSignal& signal;
    const ModeVector& mode;
    const std::array<bool, 3>& frozen;
    bool hybrid;
    const Vec& y0;
    const Vec& f0;
    const Vec& y1;
    const Vec& f1;
    double t0, h;

    bool held(Axis a) const {
        return hybrid ? mode[a] == Mode::Rest : frozen[idx(a)];
    }

    bool rest_unfrozen(Axis a) const {
        return hybrid && mode[a] == Mode::Rest && !frozen[idx(a)];
    }

    bool any_rest_unfrozen() const {
        for (Axis a : kAllAxes)
            if (rest_unfrozen(a)) return true;
        return false;
    }

    // Pins resting-axis positions (and the frozen pendulum) to their
    // step-start values: interpolation must never smear a plateau.
    void snap_held(CraneState& s) const {
        for (Axis a : kAllAxes) {
            if (held(a)) {
                set_position(s, a, y0[static_cast<std::size_t>(2 * idx(a))]);
                set_velocity(s, a, 0.0);
            }
        }
        if (p.m_payload == 0.0) {
            s.alpha = y0[6];
            s.dalpha = 0.0;
            s.beta = y0[8];
            s.dbeta = 0.0;
        }
    }

    // Interpolation only; cheap enough for every output sample.
    GuardProbe probe(double tq) const {
        Vec yq;
        Rk45<CraneState::kDim>::interpolate(t0, h, y0, f0, y1, f1, tq, yq);
        GuardProbe g;
        g.s = CraneState::from_array(yq);
        snap_held(g.s);
        g.u = signal.eval_saturated(tq, p.u_sat);
        return g;
    }

    // Net guard forces of the resting axes; needs one dynamics evaluation.
    std::array<double, 3> net_forces(const GuardProbe& g) const {
        std::array<double, 3> net{};
        const DynamicsResult r = vector_field(g.s, g.u, mode, p);
        const double sa = std::sin(g.s.alpha), ca = std::cos(g.s.alpha);
        const double sb = std::sin(g.s.beta);
        const double coupling = p.m_payload > 0.0 ? r.rope_force : 0.0;
        net[0] = p.x.gain * g.u.u_x - coupling * sa * sb;
        net[1] = p.y.gain * g.u.u_y - coupling * ca;
        net[2] = r.t_rope;
        return net;
    }

    // Velocity-zero and limit guards, per axis in a motion mode.
    struct MotionFlags {
        std::array<std::optional<GuardHit>, 9> hit;  // 3 slots per axis
    };

    MotionFlags motion_flags(const GuardProbe& g, bool at_step_start) const {
        MotionFlags f;
        for (Axis a : kAllAxes) {
            if (frozen[idx(a)] || mode[a] == Mode::Rest) continue;
            const AxisParams& ax = p.axis(a);
            const int base = 3 * idx(a);
            const double dir = mode_sign(mode[a]);
            const double v = g.s.velocity(a);
            const double pos = g.s.position(a);
            // Strictly crossed velocity; an axis that broke away at the
            // step start sits at v == 0 without having crossed.
            if (dir * v < 0 || (!at_step_start && v == 0.0 && dir != 0))
                f.hit[base] = GuardHit{a, GuardKind::VelocityZero, v};
            if (pos >= ax.pos_max && !(at_step_start && pos <= ax.pos_max))
                f.hit[base + 1] = GuardHit{a, GuardKind::LimitMax, pos - ax.pos_max};
            if (pos <= ax.pos_min && !(at_step_start && pos >= ax.pos_min))
                f.hit[base + 2] = GuardHit{a, GuardKind::LimitMin, pos - ax.pos_min};
        }
        return f;
    }

    // Breakaway guards of resting axes.
    struct RestFlags {
        std::array<std::optional<GuardHit>, 3> hit;
    };

    RestFlags rest_flags(const GuardProbe& g) const {
        RestFlags f;
        if (!any_rest_unfrozen()) return f;
        const auto net = net_forces(g);
        for (Axis a : kAllAxes) {
            if (!rest_unfrozen(a)) continue;
            if (auto h = breakaway_hit(a, g.s.position(a), net[idx(a)], p.axis(a)))
                f.hit[idx(a)] = *h;
        }
        return f;
    }
};

} // namespace

const char* guard_kind_name(GuardKind k) {
    switch (k) {
        case GuardKind::VelocityZero: return "velocity_zero";
        case GuardKind::BreakawayPos: return "breakaway_pos";
        case GuardKind::BreakawayNeg: return "breakaway_neg";
        case GuardKind::LimitMin: return "limit_min";
        default: return "limit_max";
    }
}

void SimConfig::validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0))
        throw InvalidParameterError("integrator tolerances must be positive");
    if (!(event_time_tol > 0))
        throw InvalidParameterError("event time tolerance must be positive");
    if (!(max_step > 0)) throw InvalidParameterError("max_step must be positive");
    if (!(t_end > 0)) throw InvalidParameterError("t_end must be positive");
    if (!(output_dt > 0)) throw InvalidParameterError("output_dt must be positive");
    if (model == SimModel::Tanh && !(tanh_k > 0))
        throw InvalidParameterError("tanh gain k must be positive");
}

std::vector<GuardHit> guard_check(const CraneState& s, const InputVector& u,
                                  const ModeVector& mode, const CraneParams& p) {
    std::vector<GuardHit> hits;
    for (Axis a : kAllAxes) {
        const AxisParams& ax = p.axis(a);
        if (mode[a] == Mode::Rest) {
            const double netF = net_axis_force(a, s, u, mode, p);
            if (auto h = breakaway_hit(a, s.position(a), netF, ax)) hits.push_back(*h);
        } else {
            const double dir = mode_sign(mode[a]);
            const double v = s.velocity(a);
            const double pos = s.position(a);
            if (dir > 0 && pos >= ax.pos_max)
                hits.push_back({a, GuardKind::LimitMax, pos - ax.pos_max});
            else if (dir < 0 && pos <= ax.pos_min)
                hits.push_back({a, GuardKind::LimitMin, pos - ax.pos_min});
            else if (dir * v <= 0)
                hits.push_back({a, GuardKind::VelocityZero, v});
        }
    }
    return hits;
}

void apply_transition(const GuardHit& hit, CraneState& s, ModeVector& mode,
                      const CraneParams& p) {
    switch (hit.kind) {
        case GuardKind::VelocityZero:
            mode[hit.axis] = Mode::Rest;
            set_velocity(s, hit.axis, 0.0);
            break;
        case GuardKind::LimitMax:
            mode[hit.axis] = Mode::Rest;
            set_position(s, hit.axis, p.axis(hit.axis).pos_max);
            set_velocity(s, hit.axis, 0.0);
            break;
        case GuardKind::LimitMin:
            mode[hit.axis] = Mode::Rest;
            set_position(s, hit.axis, p.axis(hit.axis).pos_min);
            set_velocity(s, hit.axis, 0.0);
            break;
        case GuardKind::BreakawayPos:
            mode[hit.axis] = Mode::Pos;
            break;
        case GuardKind::BreakawayNeg:
            mode[hit.axis] = Mode::Neg;
            break;
    }
}

ModeVector infer_modes(const CraneState& s, const std::array<bool, 3>& frozen) {
    ModeVector m;
    for (Axis a : kAllAxes) {
        if (frozen[idx(a)]) {
            m[a] = Mode::Rest;
            continue;
        }
        const double v = s.velocity(a);
        m[a] = v > 0 ? Mode::Pos : (v < 0 ? Mode::Neg : Mode::Rest);
    }
    return m;
}

namespace {

ModeVector sign_modes(const CraneState& s) {
    return infer_modes(s, {false, false, false});
}

struct Emitter {
    Trajectory& traj;

    void push(double ts, const CraneState& s, const ModeVector& m,
              const InputVector& u) {
        if (!traj.t.empty() && ts <= traj.t.back() + kTimeEps) {
            if (ts >= traj.t.back() - kTimeEps) {
                traj.state.back() = s;
                traj.mode.back() = m;
                traj.input.back() = u;
            }
            return;
        }
        traj.t.push_back(ts);
        traj.state.push_back(s);
        traj.mode.push_back(m);
        traj.input.push_back(u);
    }
};

} // namespace

Trajectory integrate(const CraneState& x0, const InputSignal& u,
                     const CraneParams& p, const SimConfig& cfg) {
    cfg.validate();
    p.validate();
    const bool hybrid = cfg.model == SimModel::Hybrid;

    CraneState s = x0;
    if (!s.finite())
        throw InvalidStateError("initial state not finite: " + s.describe());
    if (!(s.L > 0)) throw InvalidStateError("initial rope length must be positive");
    if (p.m_payload == 0.0) {
        s.dalpha = 0.0;
        s.dbeta = 0.0;
    }
    for (Axis a : kAllAxes)
        if (cfg.frozen[idx(a)]) set_velocity(s, a, 0.0);
    if (hybrid) {
        for (Axis a : kAllAxes) {
            const AxisParams& ax = p.axis(a);
            const double pos = s.position(a);
            if (pos < ax.pos_min || pos > ax.pos_max)
                throw InvalidStateError(std::string("initial position outside limits on axis ") +
                                        axis_name(a));
        }
    }

    Trajectory traj;
    Emitter emit{traj};
    DynamicsDiagnostics diag;
    ModeVector mode = hybrid ? infer_modes(s, cfg.frozen) : ModeVector{};

    auto rhs = [&](double tq, const Vec& y, Vec& dydt) {
        const CraneState sq = CraneState::from_array(y);
        const InputVector uq = u.eval_saturated(tq, p.u_sat);
        const DynamicsResult r =
            hybrid ? vector_field(sq, uq, mode, p, &diag)
                   : vector_field_tanh(sq, uq, p, cfg.tanh_k, cfg.frozen, &diag);
        dydt = r.deriv;
        ++traj.stats.rhs_evals;
    };

    // Same-instant transitions implied by the initial condition.
    if (hybrid) {
        std::array<int, 3> counts{};
        const InputVector u0 = u.eval_saturated(0.0, p.u_sat);
        settle_modes(s, mode, 0.0, u0, p, cfg.frozen, counts, traj.events);
    }
    emit.push(0.0, s, hybrid ? mode : sign_modes(s), u.eval_saturated(0.0, p.u_sat));

    Rk45<CraneState::kDim> rk;
    rk.rel_tol = cfg.rel_tol;
    rk.abs_tol = cfg.abs_tol;

    Vec y = s.to_array();
    Vec f0{}, y1{}, f1{};
    double t = 0.0;
    rhs(t, y, f0);
    double h = std::min({cfg.max_step, 0.01, cfg.t_end});

    const std::vector<double> bps = u.breakpoints(cfg.t_end);
    std::size_t bp_i = 0;
    std::size_t next_grid = 1;

    const auto grid_time = [&](std::size_t k) { return static_cast<double>(k) * cfg.output_dt; };

    while (t < cfg.t_end - kTimeEps) {
        while (bp_i < bps.size() && bps[bp_i] <= t + kTimeEps) ++bp_i;
        double h_try = std::min({h, cfg.max_step, cfg.t_end - t});
        if (bp_i < bps.size() && bps[bp_i] - t < h_try) h_try = bps[bp_i] - t;

        const auto attempt = rk.try_step(rhs, t, y, f0, h_try, y1, f1);
        if (!attempt.accepted) {
            ++traj.stats.rejected_steps;
            h = Rk45<CraneState::kDim>::next_step(h_try, attempt.error_norm);
            if (h < 1e-13 * std::max(1.0, std::fabs(t)))
                throw StiffnessError(std::string("step size underflow at t=") +
                                     std::to_string(t) + " driven by component " +
                                     component_name(attempt.worst_index));
            continue;
        }
        ++traj.stats.accepted_steps;
        for (double v : y1)
            if (!std::isfinite(v))
                throw InvalidStateError("non-finite state at t=" + std::to_string(t + h_try));

        StepScanner scan{p, u, mode, cfg.frozen, hybrid, y, f0, y1, f1, t, h_try};

        std::optional<GuardHit> event_hit;
        double t_event = 0.0;
        if (hybrid) {
            const auto consider = [&](double tb, const GuardHit& hit) {
                if (!event_hit || tb < t_event) {
                    t_event = tb;
                    event_hit = hit;
                }
            };

            // Motion guards (velocity zero, limits) are pure interpolation;
            // scan them on 8 subpoints plus every output sample inside the
            // step, so a crossing can never hide at an emitted sample.
            {
                std::vector<double> ts;
                for (int j = 1; j <= 8; ++j) ts.push_back(t + h_try * j / 8.0);
                for (std::size_t k = next_grid;; ++k) {
                    const double tg = grid_time(k);
                    if (tg >= t + h_try - kTimeEps) break;
                    if (tg > t + kTimeEps) ts.push_back(tg);
                }
                std::sort(ts.begin(), ts.end());
                ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

                auto flags_prev = scan.motion_flags(scan.probe(t), true);
                double t_prev = t;
                for (double tq : ts) {
                    const auto fl = scan.motion_flags(scan.probe(tq), false);
                    bool any = false;
                    for (std::size_t gi = 0; gi < fl.hit.size(); ++gi) {
                        if (!fl.hit[gi] || flags_prev.hit[gi]) continue;
                        any = true;
                        double ta = t_prev, tb = tq;
                        GuardHit hit = *fl.hit[gi];
                        for (int it = 0; it < 80 && tb - ta > cfg.event_time_tol; ++it) {
                            const double tm = 0.5 * (ta + tb);
                            const auto fm = scan.motion_flags(scan.probe(tm), false);
                            if (fm.hit[gi]) {
                                tb = tm;
                                hit = *fm.hit[gi];
                            } else {
                                ta = tm;
                            }
                        }
                        consider(tb, hit);
                    }
                    if (any) break;
                    flags_prev = fl;
                    t_prev = tq;
                }
            }

            // Breakaway guards need a dynamics evaluation per probe; the
            // net-force crossings are swing-paced, so 4 subpoints resolve them.
            if (scan.any_rest_unfrozen()) {
                auto flags_prev = scan.rest_flags(scan.probe(t));
                double t_prev = t;
                for (int j = 1; j <= 4; ++j) {
                    const double tq = t + h_try * j / 4.0;
                    if (event_hit && tq >= t_event) break;
                    const auto fl = scan.rest_flags(scan.probe(tq));
                    bool any = false;
                    for (std::size_t gi = 0; gi < fl.hit.size(); ++gi) {
                        if (!fl.hit[gi] || flags_prev.hit[gi]) continue;
                        any = true;
                        double ta = t_prev, tb = tq;
                        GuardHit hit = *fl.hit[gi];
                        for (int it = 0; it < 80 && tb - ta > cfg.event_time_tol; ++it) {
                            const double tm = 0.5 * (ta + tb);
                            const auto fm = scan.rest_flags(scan.probe(tm));
                            if (fm.hit[gi]) {
                                tb = tm;
                                hit = *fm.hit[gi];
                            } else {
                                ta = tm;
                            }
                        }
                        consider(tb, hit);
                    }
                    if (any) break;
                    flags_prev = fl;
                    t_prev = tq;
                }
            }
        }

        if (event_hit) {
            // Emit grid samples strictly before the event.
            while (grid_time(next_grid) < t_event - kTimeEps) {
                const GuardProbe g = scan.probe(grid_time(next_grid));
                emit.push(grid_time(next_grid), g.s, mode, g.u);
                ++next_grid;
            }
            GuardProbe ge = scan.probe(t_event);
            CraneState se = ge.s;

            std::array<int, 3> counts{};
            counts[idx(event_hit->axis)] = 1;
            GuardEvent ev;
            ev.time = t_event;
            ev.axis = event_hit->axis;
            ev.kind = event_hit->kind;
            ev.pre_mode = mode;
            ev.guard_value = event_hit->value;
            apply_transition(*event_hit, se, mode, p);
            ev.post_mode = mode;
            traj.events.push_back(ev);
            settle_modes(se, mode, t_event, ge.u, p, cfg.frozen, counts, traj.events);

            emit.push(t_event, se, mode, ge.u);
            while (grid_time(next_grid) <= t_event + kTimeEps) ++next_grid;

            t = t_event;
            y = se.to_array();
            rhs(t, y, f0);
            continue;
        }

        // No event: flush grid samples covered by this step.
        while (grid_time(next_grid) <= t + h_try + kTimeEps) {
            const GuardProbe g = scan.probe(std::min(grid_time(next_grid), t + h_try));
            emit.push(grid_time(next_grid), g.s,
                      hybrid ? mode : sign_modes(g.s), g.u);
            ++next_grid;
        }
        t += h_try;
        y = y1;
        f0 = f1;
        h = Rk45<CraneState::kDim>::next_step(h_try, attempt.error_norm);
    }

    traj.stats.beta_singular_evals = diag.beta_singular_evals;
    return traj;
}

} // namespace crane3d
