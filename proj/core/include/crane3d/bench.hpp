#pragma once

#include <string>
#include <vector>

#include "crane3d/hybrid.hpp"

namespace crane3d {

/// One scenario: parameters, initial condition, drive and simulation setup.
/// `rmse_axis` names the axis whose velocity is compared across models.
struct Scenario {
    std::string name;
    CraneParams params;
    CraneState initial_state;
    InputSignal input;
    SimConfig sim;
    Axis rmse_axis = Axis::Y;
};

struct BenchmarkRow {
    std::string model;       ///< "hybrid" or "tanh(k)"
    double wall_time_s = 0;  ///< median over repeats, integration only
    double rmse = 0;         ///< velocity RMSE against the hybrid reference
    bool failed = false;
    std::string error;
};

struct BenchmarkOptions {
    std::vector<double> k_values{1, 10, 100, 1000, 10000};
    int repeats = 5;   ///< timed runs per model; one warm-up run is discarded
};

/// Root-mean-square difference of one axis velocity between two trajectories,
/// evaluated on the shared uniform output grid (event-instant samples are
/// skipped).
double velocity_rmse(const Trajectory& a, const Trajectory& b, Axis axis,
                     double output_dt);

/// Runs the hybrid model once as reference, then the tanh baseline for each
/// gain in `k_values`. Wall time is the median of `repeats` runs around
/// integrate() only; a failing run marks its row and the table is still
/// produced.
std::vector<BenchmarkRow> run_benchmark(const Scenario& scenario,
                                        const BenchmarkOptions& opt);

} // namespace crane3d
