#pragma once

#include <array>
#include <cstdint>

#include "crane3d/params.hpp"
#include "crane3d/types.hpp"

namespace crane3d {

/// Below this |sin(alpha)| the beta equation is at its coordinate singularity;
/// beta acceleration falls back to the damping term alone.
inline constexpr double kSinAlphaSingular = 1e-4;

/// Counters a caller may pass to collect numerical diagnostics.
struct DynamicsDiagnostics {
    std::uint64_t beta_singular_evals = 0;
};

/// Cartesian payload position (x_p, y_p, z_p) from trolley position, rope
/// length and swing angles. z is measured upward from the trolley plane, so a
/// hanging payload has z_p = -L.
std::array<double, 3> payload_position(const CraneState& s);

/// Work variables shared by the vector field and the guard evaluation.
struct DynamicsResult {
    StateDeriv deriv{};     ///< d(state)/dt
    double acc_x = 0.0;
    double acc_y = 0.0;
    double acc_l = 0.0;
    double rope_force = 0.0;  ///< force transmitted through the rope into the
                              ///< trolley couplings (drive-side when slipping,
                              ///< holding reaction when the rope is at rest)
    double t_rope = 0.0;      ///< net force along the rope axis (breakaway guard)
};

/// Continuous dynamics with mode-selected friction.
///
/// Friction direction is taken from `mode`, never from the instantaneous
/// velocity sign: during integration the discrete mode is authoritative.
/// Axes in Rest mode contribute exactly zero velocity and acceleration. When
/// the rope is at rest its holding reaction replaces the motor-side rope force
/// in the trolley couplings; the reaction is resolved together with the
/// trolley accelerations so that a locked rope behaves as a rigid constraint.
///
/// Throws InvalidStateError for non-finite states or L below half the lower
/// rope limit.
DynamicsResult vector_field(const CraneState& s, const InputVector& u,
                            const ModeVector& mode, const CraneParams& p,
                            DynamicsDiagnostics* diag = nullptr);

/// Smooth baseline dynamics: sign(v) replaced by tanh(k v) in every friction
/// term, no discrete modes and no position limits. `frozen` marks axes held
/// as rigid constraints (same treatment as a permanently resting axis).
DynamicsResult vector_field_tanh(const CraneState& s, const InputVector& u,
                                 const CraneParams& p, double k,
                                 const std::array<bool, 3>& frozen = {false, false, false},
                                 DynamicsDiagnostics* diag = nullptr);

/// Net force on a resting axis, the quantity compared against the static
/// Coulomb level in the breakaway guards. The queried axis is held at rest;
/// the other axes follow `mode`.
double net_axis_force(Axis axis, const CraneState& s, const InputVector& u,
                      const ModeVector& mode, const CraneParams& p);

/// Kinetic plus potential energy of rail, trolley and payload, with the
/// reflected motor inertias included in the translational terms.
double mechanical_energy(const CraneState& s, const CraneParams& p);

} // namespace crane3d
