#pragma once

#include <string>
#include <vector>

namespace crane3d {

/// Encoder geometry used when synthesizing measurement-grade data. Linear
/// axes see one pulse per 2*pi/pulses_per_rev of pulley rotation; the angle
/// channels quantize the angle itself (scale 1).
struct EncoderSpec {
    int pulses_per_rev = 4096;
    double scale_x = 0.04;
    double scale_y = 0.04;
    double scale_l = 0.015;
    double scale_alpha = 1.0;
    double scale_beta = 1.0;
};

/// One logged experiment: commanded voltages and encoder-grade positions at a
/// fixed sample period. Velocities are never logged; they are reconstructed
/// offline, exactly as with the real rig.
struct MeasurementRecord {
    std::string kind;   ///< e.g. "rope_quasistatic", "rope_noload", "free_swing"
    double mass = 0.0;  ///< payload mass during the experiment [kg]
    double dt = 0.002;
    bool quantized = true;
    std::vector<double> t;
    std::vector<double> u_x, u_y, u_l;
    std::vector<double> x_t, y_t, L, alpha, beta;

    std::size_t size() const { return t.size(); }
};

/// Breakaway voltage measurements collected over the workspace: dataset G of
/// the active-sampling loop. Voltages are stored as positive magnitudes.
struct BreakawayDataset {
    std::vector<double> x, y;  ///< commanded trolley position per row
    std::vector<double> ux_pos, ux_neg, uy_pos, uy_neg;

    std::size_t size() const { return x.size(); }
};

} // namespace crane3d
