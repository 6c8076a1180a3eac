#pragma once

#include <optional>
#include <string>
#include <vector>

namespace crane3d::cli {

// Exit codes shared by all subcommands:
//   1 schema/configuration error, 2 simulation failure,
//   3 missing records for an estimation step, 4 ill-conditioned regression.

struct SimulateArgs {
    std::string scenario_path;
    std::optional<std::string> model;  // "hybrid" | "tanh"
    std::optional<double> tanh_k;
    std::string out_csv;
};
int cmd_simulate(const SimulateArgs& args);

struct BenchmarkArgs {
    int case_id = 1;                    // 1 or 2, resolved against the fixture dir
    std::optional<std::string> scenario_path;  // overrides case_id
    std::vector<double> ks{1, 10, 100, 1000, 10000};
    int repeats = 5;
    std::optional<std::string> out_csv;
};
int cmd_benchmark(const BenchmarkArgs& args);

struct EstimateArgs {
    std::string data_dir;
    std::vector<std::string> steps{"all"};
    std::string out_params;
    std::optional<std::string> out_diagnostics;
};
int cmd_estimate(const EstimateArgs& args);

struct SynthArgs {
    std::optional<std::string> spec_path;
    std::string params_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};
int cmd_synth(const SynthArgs& args);

struct FilterArgs {
    std::string in_csv;
    std::string out_csv;
    double cutoff_hz = 3.0;
    int order = 4;
    double mask_window_s = 0.15;
};
int cmd_filter(const FilterArgs& args);

/// Fixture lookup: CRANE3D_FIXTURE_DIR env var, falling back to the
/// compile-time default.
std::string fixture_path(const std::string& name);

} // namespace crane3d::cli
