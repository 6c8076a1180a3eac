#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "crane3d/gpr.hpp"
#include "crane3d/params.hpp"
#include "crane3d/records.hpp"
#include "crane3d/sigproc.hpp"

namespace crane3d {

/// Small dense row-major matrix, enough for regression bookkeeping.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Linear regression target || phi * theta - y ||^2 with named columns.
struct RegressionProblem {
    Matrix phi;
    std::vector<double> target;
    std::vector<std::string> labels;
};

struct LsResult {
    std::vector<double> estimates;
    double residual_rms = 0.0;
    Matrix correlation;  ///< of the estimates, unit diagonal
    std::vector<std::string> labels;

    double max_offdiag() const;
};

/// Ordinary least squares via QR with a conditioning check (condition number
/// below 1e10 required). The estimate correlation matrix is the normalized
/// (phi^T phi)^{-1}. Throws IllConditionedError naming the most collinear
/// column pair on rank deficiency; emits no warning below 10 rows per column
/// (callers log that themselves if they care).
LsResult ls_solve(const RegressionProblem& problem);

/// Preprocessing knobs shared by all estimation steps.
struct PreprocessOptions {
    FilterSpec filter{4, 3.0};
    double mask_window_s = 0.15;
    /// Additionally exclude samples slower than this fraction of the peak
    /// filtered speed; resting segments must not leak into the regressors.
    double min_speed_frac = 0.05;
};

/// Filtered position with derivatives and the zero-crossing exclusion mask.
struct ProcessedChannel {
    SampledSignal pos;
    SampledSignal vel;
    SampledSignal acc;
    std::vector<char> mask;
};

ProcessedChannel preprocess_channel(const std::vector<double>& raw, double dt,
                                    const PreprocessOptions& opt);

/// Breakaway voltage from one ramp record: the commanded voltage at the last
/// sample before the position deviates more than `motion_tol` from its
/// starting value. Throws SaturationError when no motion is detected.
struct BreakawayEstimate {
    double voltage = 0.0;  ///< signed ramp voltage at motion onset
    double time = 0.0;
};
BreakawayEstimate estimate_breakaway(const std::vector<double>& t,
                                     const std::vector<double>& u,
                                     const std::vector<double>& pos,
                                     double motion_tol);

/// Staged rope estimation.
///   p3   from quasistatic ramps (averaged magnitudes, both directions);
///   p1,p2 by LS on the no-load record with p3 fixed;
///   p4   by LS on the concatenated loaded records with p1..p3 fixed.
struct RopeEstimate {
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
    std::vector<double> p3_samples;  ///< per-ramp magnitudes
    LsResult noload;                 ///< columns [accel, vel]
    LsResult loaded;                 ///< column [(accel - g) * mass]
    LsResult joint;                  ///< 4-column variant, kept for diagnostics
};
RopeEstimate estimate_rope(const std::vector<MeasurementRecord>& quasistatic,
                           const MeasurementRecord& noload,
                           const std::vector<MeasurementRecord>& loaded,
                           double gravity, double encoder_quantum,
                           const PreprocessOptions& opt);

/// One-axis motion estimation with the Coulomb map fixed.
/// The acceleration coefficient is the identifiable combination
/// (Jbar/K + (moving mass)/K); splitting it needs the gain from the rope
/// stage and is done by the pipeline.
struct AxisEstimate {
    double acc_coeff = 0;  ///< on the acceleration column [V s^2/m]
    double p7_pos = 0, p7_neg = 0;
    LsResult ls;
};
AxisEstimate estimate_axis(const MeasurementRecord& rec, Axis axis,
                           const Polynomial4& p5_pos, const Polynomial4& p5_neg,
                           const PreprocessOptions& opt);

/// Swing damping from free-oscillation records (trolley and rope stationary).
struct SwingEstimate {
    double d_alpha = 0, d_beta = 0;
    LsResult ls_alpha, ls_beta;
};
SwingEstimate estimate_swing_damping(const std::vector<MeasurementRecord>& records,
                                     double payload_mass, double gravity,
                                     const PreprocessOptions& opt);

/// Measures the four breakaway components at a commanded trolley position;
/// ordering {x+, x-, y+, y-}. Magnitudes in volts.
using BreakawayOracle = std::function<std::array<double, 4>(double x, double y)>;

struct ActiveSamplingConfig {
    int initial_points = 5;      ///< per axis, spread uniformly
    int candidate_grid = 101;    ///< per axis
    double std_threshold = 0.05; ///< stop when max posterior std drops below [V]
    int max_points = 25;         ///< total measured positions
    double time_budget_s = std::numeric_limits<double>::infinity();
    double margin = 0.01;        ///< keep this distance from the position limits [m]
};

/// Active GPR sampling of the four friction maps: fit, query the candidate
/// grid, measure where the posterior variance peaks, repeat until a stopping
/// criterion fires. A failing oracle call skips that point and continues.
struct ActiveSamplingResult {
    BreakawayDataset dataset;
    std::vector<GprModel> models;  ///< x+, x-, y+, y- (fitted on the final dataset)
    double max_posterior_std = 0;
    std::string stop_reason;
};
ActiveSamplingResult active_sampling(const BreakawayOracle& oracle,
                                     double x_min, double x_max, double y_min,
                                     double y_max, const ActiveSamplingConfig& cfg);

/// Quartic LS fit to the GPR posterior mean on a 201-point grid over
/// [lo, hi]; `max_deviation` reports the largest |poly - mean| on that grid.
Polynomial4 fit_poly4(const GprModel& model, double lo, double hi,
                      double* max_deviation = nullptr);

} // namespace crane3d
