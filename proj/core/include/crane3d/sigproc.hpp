#pragma once

#include <vector>

#include "crane3d/types.hpp"

namespace crane3d {

/// Uniformly sampled scalar series. `valid` marks samples that carry usable
/// values (finite-difference endpoints are flagged invalid, everything else
/// starts valid).
struct SampledSignal {
    double t0 = 0.0;
    double dt = 0.002;
    std::vector<double> values;
    std::vector<char> valid;  // empty means all valid

    std::size_t size() const { return values.size(); }
    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    bool is_valid(std::size_t k) const { return valid.empty() || valid[k]; }
    void mark_invalid(std::size_t k) {
        if (valid.empty()) valid.assign(values.size(), 1);
        valid[k] = 0;
    }
};

/// Low-pass Butterworth specification for zero-phase (forward-backward) use.
struct FilterSpec {
    int order = 4;
    double cutoff_hz = 3.0;
};

/// Zero-phase low-pass filtering: digital Butterworth coefficients from the
/// analog prototype via the bilinear transform with frequency pre-warping,
/// applied forward and then backward over odd-reflection padding of length
/// 3*(order+1). Output has the input length and no phase lag.
///
/// Throws SchemaError when the cutoff reaches the Nyquist frequency or the
/// signal is shorter than three filter orders.
SampledSignal butter_filtfilt(const SampledSignal& x, const FilterSpec& spec);

/// First derivative by central differences; the two boundary samples are
/// marked invalid.
SampledSignal central_diff_velocity(const SampledSignal& x);

/// Second derivative by central differences; boundary samples invalid.
SampledSignal central_diff_accel(const SampledSignal& x);

/// False within +-window_s of every velocity sign change and wherever the
/// input is invalid. Samples that are exactly zero count as sign boundaries.
std::vector<char> mask_zero_crossings(const SampledSignal& velocity, double window_s);

/// Floor quantization to the encoder grid: step = scale * 2*pi / pulses_per_rev.
SampledSignal quantize_encoder(const SampledSignal& x, int pulses_per_rev,
                               double scale);

/// Digital filter coefficients (direct form), b and a with a[0] = 1.
struct FilterCoeffs {
    std::vector<double> b;
    std::vector<double> a;
};

/// Exposed for the analytic-response tests.
FilterCoeffs butterworth_coeffs(int order, double cutoff_hz, double dt);

} // namespace crane3d
