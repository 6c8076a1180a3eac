#pragma once

#include <cmath>
#include <vector>

#include "crane3d/types.hpp"

namespace crane3d {

/// One scalar drive waveform. Square and ramp signals report their corner
/// times through breakpoints() so the integrator never steps across a
/// discontinuity.
struct AxisSignal {
    enum class Kind { Zero, Constant, Sine, Square, Ramp, MultiSine };

    Kind kind = Kind::Zero;
    double bias = 0.0;
    double amplitude = 0.0;
    double freq_hz = 0.0;     ///< Sine
    double phase = 0.0;       ///< Sine [rad]
    double period = 1.0;      ///< Square [s]
    double rate = 0.0;        ///< Ramp [V/s]
    double start_time = 0.0;  ///< Ramp start [s]
    // MultiSine: sum of amplitude[i] * sin(2 pi f[i] t + phase[i]) + bias
    std::vector<double> ms_amplitude;
    std::vector<double> ms_freq_hz;
    std::vector<double> ms_phase;

    double eval(double t) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Constant: return bias;
            case Kind::Sine:
                return bias + amplitude * std::sin(2.0 * M_PI * freq_hz * t + phase);
            case Kind::Square: {
                double ph = std::fmod(t, period);
                if (ph < 0) ph += period;
                return bias + (ph < 0.5 * period ? amplitude : -amplitude);
            }
            case Kind::Ramp:
                return bias + (t > start_time ? rate * (t - start_time) : 0.0);
            case Kind::MultiSine: {
                double v = bias;
                for (std::size_t i = 0; i < ms_amplitude.size(); ++i)
                    v += ms_amplitude[i] *
                         std::sin(2.0 * M_PI * ms_freq_hz[i] * t + ms_phase[i]);
                return v;
            }
        }
        return 0.0;
    }

    void append_breakpoints(double t_end, std::vector<double>& out) const {
        if (kind == Kind::Square) {
            for (double t = 0.5 * period; t < t_end; t += 0.5 * period) out.push_back(t);
        } else if (kind == Kind::Ramp) {
            if (start_time > 0 && start_time < t_end) out.push_back(start_time);
        }
    }

    static AxisSignal zero() { return {}; }
    static AxisSignal constant(double v) {
        AxisSignal s;
        s.kind = Kind::Constant;
        s.bias = v;
        return s;
    }
    static AxisSignal sine(double amplitude, double freq_hz, double bias = 0.0,
                           double phase = 0.0) {
        AxisSignal s;
        s.kind = Kind::Sine;
        s.amplitude = amplitude;
        s.freq_hz = freq_hz;
        s.bias = bias;
        s.phase = phase;
        return s;
    }
    static AxisSignal square(double amplitude, double period, double bias = 0.0) {
        AxisSignal s;
        s.kind = Kind::Square;
        s.amplitude = amplitude;
        s.period = period;
        s.bias = bias;
        return s;
    }
    static AxisSignal ramp(double rate, double start_time = 0.0, double bias = 0.0) {
        AxisSignal s;
        s.kind = Kind::Ramp;
        s.rate = rate;
        s.start_time = start_time;
        s.bias = bias;
        return s;
    }
    static AxisSignal multisine(std::vector<double> amplitudes, std::vector<double> freqs,
                                std::vector<double> phases, double bias = 0.0) {
        AxisSignal s;
        s.kind = Kind::MultiSine;
        s.ms_amplitude = std::move(amplitudes);
        s.ms_freq_hz = std::move(freqs);
        s.ms_phase = std::move(phases);
        s.bias = bias;
        return s;
    }
};

/// Drive command u(t) for the three axes.
struct InputSignal {
    AxisSignal x;
    AxisSignal y;
    AxisSignal l;

    InputVector eval(double t) const { return {x.eval(t), y.eval(t), l.eval(t)}; }

    /// Saturated evaluation; |u| is clamped to u_sat per axis.
    InputVector eval_saturated(double t, double u_sat) const;

    /// Sorted, deduplicated discontinuity times in (0, t_end).
    std::vector<double> breakpoints(double t_end) const;

    static InputSignal zero() { return {}; }
};

} // namespace crane3d
