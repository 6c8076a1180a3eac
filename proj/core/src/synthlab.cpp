#include "crane3d/synthlab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "crane3d/dynamics.hpp"
#include "crane3d/errors.hpp"
#include "crane3d/sigproc.hpp"

namespace crane3d {

namespace {

constexpr double kTs = 0.002;

double quantum(const EncoderSpec& e, Axis a) {
    const double scale = a == Axis::X ? e.scale_x : (a == Axis::Y ? e.scale_y : e.scale_l);
    return scale * 2.0 * M_PI / e.pulses_per_rev;
}

std::vector<double> quantize_channel(const std::vector<double>& v, double scale,
                                     int ppr) {
    SampledSignal s;
    s.dt = kTs;
    s.values = v;
    return quantize_encoder(s, ppr, scale).values;
}

SimConfig record_sim_config(double duration) {
    SimConfig cfg;
    cfg.rel_tol = 1e-8;
    cfg.abs_tol = 1e-11;
    cfg.t_end = duration;
    cfg.output_dt = kTs;
    cfg.max_step = 0.05;
    return cfg;
}

// Default rich drive: three incommensurate tones inside the filter passband,
// so velocity and acceleration stay identifiable after the offline chain.
AxisSignal rich_multisine(double amplitude, double bias, double phase_shift) {
    return AxisSignal::multisine({amplitude, 0.6 * amplitude, 0.35 * amplitude},
                                 {0.2, 0.45, 0.85},
                                 {phase_shift, phase_shift + 1.3, phase_shift + 2.1},
                                 bias);
}

CraneState start_state(const ExperimentSpec& spec) {
    CraneState s;
    s.x_t = spec.start_x;
    s.y_t = spec.start_y;
    s.L = spec.start_l;
    s.alpha = M_PI / 2;
    s.beta = 0.0;
    return s;
}

MeasurementRecord traj_to_record(const Trajectory& traj, const ExperimentSpec& spec,
                                 const EncoderSpec& enc) {
    MeasurementRecord rec;
    rec.dt = kTs;
    rec.mass = spec.mass;
    rec.quantized = spec.quantize;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double k = traj.t[i] / kTs;
        if (std::fabs(k - std::round(k)) > 1e-9) continue;  // drop event samples
        rec.t.push_back(std::round(k) * kTs);
        rec.u_x.push_back(traj.input[i].u_x);
        rec.u_y.push_back(traj.input[i].u_y);
        rec.u_l.push_back(traj.input[i].u_l);
        rec.x_t.push_back(traj.state[i].x_t);
        rec.y_t.push_back(traj.state[i].y_t);
        rec.L.push_back(traj.state[i].L);
        rec.alpha.push_back(traj.state[i].alpha);
        rec.beta.push_back(traj.state[i].beta);
    }
    if (spec.quantize) {
        rec.x_t = quantize_channel(rec.x_t, enc.scale_x, enc.pulses_per_rev);
        rec.y_t = quantize_channel(rec.y_t, enc.scale_y, enc.pulses_per_rev);
        rec.L = quantize_channel(rec.L, enc.scale_l, enc.pulses_per_rev);
        rec.alpha = quantize_channel(rec.alpha, enc.scale_alpha, enc.pulses_per_rev);
        rec.beta = quantize_channel(rec.beta, enc.scale_beta, enc.pulses_per_rev);
    }
    return rec;
}

// Largest excursion of one axis from its starting position under a trial
// amplitude; used to tune drive amplitudes against the workspace limits.
double peak_excursion(const CraneParams& p, const ExperimentSpec& spec, Axis axis,
                      double amplitude, double bias) {
    CraneParams params = p;
    params.m_payload = spec.mass;
    InputSignal u;
    AxisSignal sig = rich_multisine(amplitude, bias, axis == Axis::Y ? 0.7 : 0.0);
    (axis == Axis::X ? u.x : axis == Axis::Y ? u.y : u.l) = sig;
    SimConfig cfg = record_sim_config(std::min(12.0, spec.duration));
    cfg.rel_tol = 1e-6;
    cfg.abs_tol = 1e-9;
    const CraneState s0 = start_state(spec);
    const Trajectory tr = integrate(s0, u, params, cfg);
    double peak = 0.0;
    for (const auto& st : tr.state)
        peak = std::max(peak, std::fabs(st.position(axis) - s0.position(axis)));
    return peak;
}

double tune_amplitude(const CraneParams& p, const ExperimentSpec& spec, Axis axis,
                      double bias) {
    const AxisParams& ax = (axis == Axis::X) ? p.x : (axis == Axis::Y) ? p.y : p.l;
    const double margin = 0.03;
    const double start = axis == Axis::X ? spec.start_x
                       : axis == Axis::Y ? spec.start_y
                                         : spec.start_l;
    const double target =
        std::min(ax.pos_max - margin - start, start - (ax.pos_min + margin));
    if (target <= 0) throw PreconditionError("start position leaves no travel room");

    double hi = 0.95 * p.u_sat / 1.95;  // keep the multisine peak unsaturated
    if (peak_excursion(p, spec, axis, hi, bias) <= target) return hi;
    double lo = 0.0;
    for (int it = 0; it < 11; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (peak_excursion(p, spec, axis, mid, bias) <= target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace

MeasurementRecord run_experiment(const ExperimentSpec& spec, const CraneParams& truth,
                                 const EncoderSpec& encoder) {
    CraneParams p = truth;
    p.m_payload = spec.mass;
    CraneState s0 = start_state(spec);
    InputSignal u;
    SimConfig cfg = record_sim_config(spec.duration);

    switch (spec.kind) {
        case ExperimentSpec::Kind::QuasistaticRamp:
        case ExperimentSpec::Kind::BreakawayAt: {
            AxisSignal ramp = AxisSignal::ramp(spec.direction * spec.ramp_rate);
            (spec.axis == Axis::X ? u.x : spec.axis == Axis::Y ? u.y : u.l) = ramp;
            break;
        }
        case ExperimentSpec::Kind::RichMotion: {
            if (spec.drive_x) u.x = rich_multisine(tune_amplitude(p, spec, Axis::X, 0.0), 0.0, 0.0);
            if (spec.drive_y) u.y = rich_multisine(tune_amplitude(p, spec, Axis::Y, 0.0), 0.0, 0.7);
            if (spec.drive_l) u.l = rich_multisine(tune_amplitude(p, spec, Axis::L, 0.0), 0.0, 0.35);
            break;
        }
        case ExperimentSpec::Kind::LoadedRope: {
            // Gravity feedforward keeps the loaded rope centered in its range.
            const double bias = -truth.gravity * spec.mass / truth.l.gain;
            u.l = rich_multisine(tune_amplitude(p, spec, Axis::L, bias), bias, 0.35);
            break;
        }
        case ExperimentSpec::Kind::FreeSwing: {
            s0.alpha = spec.alpha0;
            s0.beta = spec.beta0;
            break;
        }
    }

    const Trajectory traj = integrate(s0, u, p, cfg);
    MeasurementRecord rec = traj_to_record(traj, spec, encoder);
    switch (spec.kind) {
        case ExperimentSpec::Kind::QuasistaticRamp: rec.kind = "rope_quasistatic"; break;
        case ExperimentSpec::Kind::BreakawayAt: rec.kind = "breakaway_ramp"; break;
        case ExperimentSpec::Kind::RichMotion:
            rec.kind = spec.drive_l ? "rope_noload" : "xy_motion";
            break;
        case ExperimentSpec::Kind::LoadedRope: rec.kind = "rope_loaded"; break;
        case ExperimentSpec::Kind::FreeSwing: rec.kind = "free_swing"; break;
    }
    return rec;
}

std::array<double, 4> breakaway_measurement(double x, double y,
                                            const CraneParams& truth,
                                            const std::optional<EncoderSpec>& encoder,
                                            double noise_sigma, std::mt19937_64& rng) {
    std::array<double, 4> out{};
    std::normal_distribution<double> noise(0.0, noise_sigma);
    int slot = 0;
    for (Axis axis : {Axis::X, Axis::Y}) {
        for (int dir : {+1, -1}) {
            ExperimentSpec spec;
            spec.kind = ExperimentSpec::Kind::BreakawayAt;
            spec.axis = axis;
            spec.direction = dir;
            spec.mass = 0.0;
            spec.start_x = x;
            spec.start_y = y;
            spec.quantize = encoder.has_value();

            // The virtual operator knows roughly where breakaway sits and
            // sizes the ramp accordingly.
            CraneParams p = truth;
            p.m_payload = 0.0;
            const AxisParams& ax = axis == Axis::X ? p.x : p.y;
            const double pos = axis == Axis::X ? x : y;
            const double expect =
                coulomb_force(ax.friction, pos, dir) / ax.gain;
            spec.duration = std::min((expect * 1.3 + 0.4) / spec.ramp_rate,
                                     p.u_sat / spec.ramp_rate);

            double voltage;
            if (encoder) {
                const MeasurementRecord rec = run_experiment(spec, truth, *encoder);
                const std::vector<double>& ch = axis == Axis::X ? rec.x_t : rec.y_t;
                const std::vector<double>& uch = axis == Axis::X ? rec.u_x : rec.u_y;
                const double tol = 2.0 * quantum(*encoder, axis);
                voltage = std::fabs(estimate_breakaway(rec.t, uch, ch, tol).voltage);
            } else {
                InputSignal u;
                (axis == Axis::X ? u.x : u.y) =
                    AxisSignal::ramp(dir * spec.ramp_rate);
                SimConfig cfg = record_sim_config(spec.duration);
                CraneState s0 = start_state(spec);
                const Trajectory tr = integrate(s0, u, p, cfg);
                const GuardEvent* hit = nullptr;
                for (const auto& ev : tr.events)
                    if (ev.axis == axis && (ev.kind == GuardKind::BreakawayPos ||
                                            ev.kind == GuardKind::BreakawayNeg)) {
                        hit = &ev;
                        break;
                    }
                if (!hit) throw SaturationError("breakaway ramp saturated");
                voltage = std::fabs(dir * spec.ramp_rate * hit->time);
            }
            out[static_cast<std::size_t>(slot++)] =
                voltage + (noise_sigma > 0 ? noise(rng) : 0.0);
        }
    }
    return out;
}

BreakawayOracle make_breakaway_oracle(const CraneParams& truth,
                                      std::optional<EncoderSpec> encoder,
                                      double noise_sigma, std::uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [truth, encoder, noise_sigma, rng](double x, double y) {
        return breakaway_measurement(x, y, truth, encoder, noise_sigma, *rng);
    };
}

SynthSuite generate_suite(const CraneParams& truth, const EncoderSpec& encoder,
                          const SuiteOptions& opt) {
    SynthSuite suite;
    suite.info.m_rail = truth.m_rail;
    suite.info.m_trolley = truth.m_trolley;
    suite.info.gravity = truth.gravity;
    suite.info.u_sat = truth.u_sat;
    suite.info.radius_x = truth.x.radius;
    suite.info.radius_y = truth.y.radius;
    suite.info.radius_l = truth.l.radius;
    suite.info.x_min = truth.x.pos_min;
    suite.info.x_max = truth.x.pos_max;
    suite.info.y_min = truth.y.pos_min;
    suite.info.y_max = truth.y.pos_max;
    suite.info.l_min = truth.l.pos_min;
    suite.info.l_max = truth.l.pos_max;
    suite.info.encoder = encoder;
    suite.info.quantized = opt.quantize;

    const double p3_true = coulomb_force(truth.l.friction, 0.35, +1) / truth.l.gain;
    const double ramp_rate = 0.1;
    const double ramp_duration = (p3_true * 1.3 + 0.5) / ramp_rate;

    // Quasistatic rope ramps, both directions, varied starting lengths.
    for (int r = 0; r < opt.quasistatic_repeats; ++r) {
        for (int dir : {+1, -1}) {
            ExperimentSpec spec;
            spec.kind = ExperimentSpec::Kind::QuasistaticRamp;
            spec.axis = Axis::L;
            spec.direction = dir;
            spec.mass = 0.0;
            spec.ramp_rate = ramp_rate;
            spec.duration = ramp_duration;
            spec.start_l = 0.25 + 0.1 * r;
            spec.quantize = opt.quantize;
            spec.seed = opt.seed + static_cast<std::uint64_t>(r);
            suite.records.push_back(run_experiment(spec, truth, encoder));
        }
    }

    {
        ExperimentSpec spec;
        spec.kind = ExperimentSpec::Kind::RichMotion;
        spec.drive_l = true;
        spec.mass = 0.0;
        spec.duration = opt.motion_duration;
        spec.quantize = opt.quantize;
        suite.records.push_back(run_experiment(spec, truth, encoder));
    }

    for (std::size_t i = 0; i < opt.loaded_masses.size(); ++i) {
        ExperimentSpec spec;
        spec.kind = ExperimentSpec::Kind::LoadedRope;
        spec.mass = opt.loaded_masses[i];
        spec.duration = opt.motion_duration;
        spec.quantize = opt.quantize;
        spec.seed = opt.seed + 100 + i;
        suite.records.push_back(run_experiment(spec, truth, encoder));
    }

    {
        ExperimentSpec spec;
        spec.kind = ExperimentSpec::Kind::RichMotion;
        spec.drive_x = true;
        spec.drive_y = true;
        spec.mass = 0.0;
        spec.duration = opt.motion_duration;
        spec.quantize = opt.quantize;
        suite.records.push_back(run_experiment(spec, truth, encoder));
    }

    const double swing_defl[][2] = {{0.45, 0.25}, {-0.35, 0.30}, {0.40, -0.28}};
    for (int i = 0; i < opt.swing_records; ++i) {
        ExperimentSpec spec;
        spec.kind = ExperimentSpec::Kind::FreeSwing;
        spec.mass = opt.swing_mass;
        spec.duration = opt.swing_duration;
        spec.alpha0 = M_PI / 2 + swing_defl[i % 3][0];
        spec.beta0 = swing_defl[i % 3][1];
        spec.quantize = opt.quantize;
        spec.seed = opt.seed + 200 + static_cast<std::uint64_t>(i);
        suite.records.push_back(run_experiment(spec, truth, encoder));
    }

    const BreakawayOracle oracle = make_breakaway_oracle(
        truth, opt.quantize ? std::optional<EncoderSpec>(encoder) : std::nullopt,
        opt.oracle_noise, opt.seed + 1000);
    suite.sampling =
        active_sampling(oracle, truth.x.pos_min, truth.x.pos_max, truth.y.pos_min,
                        truth.y.pos_max, opt.sampling);
    suite.breakaway = suite.sampling.dataset;
    return suite;
}

Dataset suite_to_dataset(const SynthSuite& suite) {
    Dataset ds;
    ds.info = suite.info;
    ds.records = suite.records;
    ds.breakaway = suite.breakaway;
    return ds;
}

} // namespace crane3d
