#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "crane3d/estimation.hpp"
#include "crane3d/hybrid.hpp"
#include "crane3d/pipeline.hpp"
#include "crane3d/records.hpp"

namespace crane3d {

/// One virtual experiment on a crane with known true parameters.
struct ExperimentSpec {
    enum class Kind { QuasistaticRamp, RichMotion, LoadedRope, FreeSwing, BreakawayAt };

    Kind kind = Kind::RichMotion;
    double mass = 0.0;       ///< payload during the experiment [kg]
    double duration = 24.0;  ///< [s]
    std::uint64_t seed = 0;
    bool quantize = true;

    // QuasistaticRamp / BreakawayAt
    Axis axis = Axis::L;
    int direction = +1;
    double ramp_rate = 0.1;  ///< [V/s]

    // Starting pose
    double start_x = 0.2525, start_y = 0.2525, start_l = 0.35;

    // RichMotion drive selection
    bool drive_x = false, drive_y = false, drive_l = false;

    // FreeSwing initial deflection
    double alpha0 = M_PI / 2 + 0.45, beta0 = 0.25;
};

/// Simulates the experiment with the hybrid model and logs an encoder-grade
/// measurement record at T_s = 0.002 s (positions floor-quantized through the
/// per-axis pulley scale when spec.quantize is set; velocities withheld).
MeasurementRecord run_experiment(const ExperimentSpec& spec,
                                 const CraneParams& truth,
                                 const EncoderSpec& encoder);

/// Simulated voltage-ramp breakaway measurement of the four components
/// {x+, x-, y+, y-} at a commanded trolley position.
///
/// With `encoder` set, detection works on the quantized record exactly like
/// the offline estimator (two encoder quanta of travel). Without it the
/// localized breakaway event itself provides the voltage. `noise_sigma` adds
/// Gaussian noise to the returned magnitudes.
std::array<double, 4> breakaway_measurement(double x, double y,
                                            const CraneParams& truth,
                                            const std::optional<EncoderSpec>& encoder,
                                            double noise_sigma, std::mt19937_64& rng);

/// Convenience factory for the active-sampling loop.
BreakawayOracle make_breakaway_oracle(const CraneParams& truth,
                                      std::optional<EncoderSpec> encoder,
                                      double noise_sigma, std::uint64_t seed);

struct SuiteOptions {
    std::vector<double> loaded_masses{0.173, 0.325, 0.457, 0.550};
    int quasistatic_repeats = 3;  ///< ramps per direction
    int swing_records = 3;
    double swing_mass = 0.457;
    double swing_duration = 30.0;
    double motion_duration = 24.0;
    bool quantize = true;
    std::uint64_t seed = 0;
    double oracle_noise = 0.0;
    ActiveSamplingConfig sampling;
};

/// A full measurement campaign: every record the estimation pipeline needs
/// plus the actively sampled breakaway dataset.
struct SynthSuite {
    std::vector<MeasurementRecord> records;
    BreakawayDataset breakaway;
    ActiveSamplingResult sampling;
    DatasetInfo info;
};

SynthSuite generate_suite(const CraneParams& truth, const EncoderSpec& encoder,
                          const SuiteOptions& opt);

/// View a suite as a pipeline dataset (no copies of the heavy records).
Dataset suite_to_dataset(const SynthSuite& suite);

} // namespace crane3d
