#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crane3d/estimation.hpp"
#include "crane3d/params.hpp"
#include "crane3d/records.hpp"

namespace crane3d {

/// Quantities known before any estimation: masses, geometry, limits.
struct DatasetInfo {
    double m_rail = 2.2;
    double m_trolley = 1.155;
    double gravity = 9.81;
    double u_sat = 12.0;
    double radius_x = 0.04, radius_y = 0.04, radius_l = 0.015;
    double x_min = 0.0, x_max = 0.505;
    double y_min = 0.0, y_max = 0.505;
    double l_min = 0.13, l_max = 0.57;
    EncoderSpec encoder;
    bool quantized = true;
};

/// A complete measurement campaign as consumed by the estimation pipeline.
struct Dataset {
    DatasetInfo info;
    std::vector<MeasurementRecord> records;
    std::optional<BreakawayDataset> breakaway;
};

struct PipelineSteps {
    bool rope = true;
    bool axes = true;
    bool swing = true;
};

struct GprFitDiag {
    GprHyper hyper;
    double poly_max_deviation = 0.0;
};

/// Everything the pipeline determined, at both the regression level (the
/// identifiable P quantities) and the disaggregated physical level.
struct PipelineResult {
    bool complete = false;
    std::vector<std::string> steps_done;

    std::optional<RopeEstimate> rope;
    std::optional<AxisEstimate> axis_x, axis_y;
    std::optional<SwingEstimate> swing;

    // Breakaway voltage maps [V] over position, direction split.
    std::optional<Polynomial4> p5x_pos, p5x_neg, p5y_pos, p5y_neg;
    std::vector<GprFitDiag> gpr;  ///< x+, x-, y+, y- when the axes step ran

    /// Physical parameters in force units. The per-axis gains follow from the
    /// rope gain and the pulley radius ratio (identical drive motors); the
    /// axis data alone only identifies ratios.
    CraneParams params;
};

/// Runs the requested estimation steps on a dataset. Record kinds consumed:
/// "rope_quasistatic" (>=1), "rope_noload" (1), "rope_loaded" (>=1),
/// "xy_motion" (1), "free_swing" (>=1), plus the breakaway dataset for the
/// axes step. Missing prerequisites raise PreconditionError.
PipelineResult run_pipeline(const Dataset& ds, const PipelineSteps& steps,
                            const PreprocessOptions& pre);

} // namespace crane3d
