#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "crane3d/dynamics.hpp"
#include "crane3d/signals.hpp"

namespace crane3d {

enum class GuardKind { VelocityZero, BreakawayPos, BreakawayNeg, LimitMin, LimitMax };

const char* guard_kind_name(GuardKind k);

/// A discrete transition of one axis, recorded in the trajectory event log.
struct GuardEvent {
    double time = 0.0;
    Axis axis = Axis::X;
    GuardKind kind = GuardKind::VelocityZero;
    ModeVector pre_mode;
    ModeVector post_mode;
    double guard_value = 0.0;  ///< net force (breakaway) or velocity (zero crossing)
};

/// Outcome of an instantaneous guard evaluation for one axis.
struct GuardHit {
    Axis axis = Axis::X;
    GuardKind kind = GuardKind::VelocityZero;
    double value = 0.0;
};

enum class SimModel { Hybrid, Tanh };

struct SimConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double event_time_tol = 1e-9;  ///< bisection width for event localization [s]
    double max_step = 0.05;        ///< [s]
    double t_end = 10.0;           ///< [s]
    double output_dt = 0.002;      ///< uniform sampling period [s]
    SimModel model = SimModel::Hybrid;
    double tanh_k = 1000.0;        ///< slope gain of the smooth friction baseline
    std::array<bool, 3> frozen{false, false, false};  ///< axes held as rigid constraints

    void validate() const;
};

struct TrajectoryStats {
    std::uint64_t accepted_steps = 0;
    std::uint64_t rejected_steps = 0;
    std::uint64_t rhs_evals = 0;
    std::uint64_t beta_singular_evals = 0;
};

/// Time-stamped simulation output: uniform grid samples plus one sample at
/// every event instant (post-transition state). Sample times are strictly
/// increasing and the mode is constant between consecutive events.
struct Trajectory {
    std::vector<double> t;
    std::vector<CraneState> state;
    std::vector<ModeVector> mode;
    std::vector<InputVector> input;
    std::vector<GuardEvent> events;
    TrajectoryStats stats;

    std::size_t size() const { return t.size(); }
};

/// Instantaneous guard evaluation, one entry per axis that has a pending
/// transition. Resting axes report breakaway when the net force strictly
/// exceeds the direction-matched Coulomb level (a resting axis parked at a
/// position limit may only break away from the limit); moving axes report
/// velocity zero crossings and limit hits.
std::vector<GuardHit> guard_check(const CraneState& s, const InputVector& u,
                                  const ModeVector& mode, const CraneParams& p);

/// Applies one transition in place: velocity-zero and limit hits enter Rest
/// (velocity zeroed exactly, position clamped for limits); breakaways enter
/// the motion mode with the velocity still zero.
void apply_transition(const GuardHit& hit, CraneState& s, ModeVector& mode,
                      const CraneParams& p);

/// Initial mode from velocity signs; frozen axes are pinned to Rest.
ModeVector infer_modes(const CraneState& s, const std::array<bool, 3>& frozen);

/// Simulates the crane from `x0` under drive `u` until cfg.t_end.
///
/// Hybrid model: adaptive RK45 with per-step guard monitoring, bisection
/// event localization to cfg.event_time_tol, and exact (bitwise) position
/// plateaus while an axis rests. Tanh model: one smooth vector field, no
/// modes, same integrator.
Trajectory integrate(const CraneState& x0, const InputSignal& u,
                     const CraneParams& p, const SimConfig& cfg);

} // namespace crane3d
