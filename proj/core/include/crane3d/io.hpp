#pragma once

#include <filesystem>
#include <string>

#include "crane3d/bench.hpp"
#include "crane3d/pipeline.hpp"
#include "crane3d/records.hpp"
#include "crane3d/synthlab.hpp"

namespace crane3d {

/// Writes text through a temporary file plus rename, so failures never leave
/// a partial file at the destination.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

// --- Trajectory series -----------------------------------------------------
// Header: t,x_t,dx_t,y_t,dy_t,L,dL,alpha,dalpha,beta,dbeta,q_x,q_y,q_l,u_x,u_y,u_l
// UTF-8, LF line endings, 17 significant digits, '.' decimal point.

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// --- Measurement records ----------------------------------------------------
// Header: t,u_x,u_y,u_l,x_t,y_t,L,alpha,beta

void write_measurement_csv(const MeasurementRecord& rec,
                           const std::filesystem::path& path);
MeasurementRecord read_measurement_csv(const std::filesystem::path& path);

// --- Breakaway dataset -------------------------------------------------------
// Header: x,y,u_x_pos,u_x_neg,u_y_pos,u_y_neg

void write_breakaway_csv(const BreakawayDataset& ds,
                         const std::filesystem::path& path);
BreakawayDataset read_breakaway_csv(const std::filesystem::path& path);

// --- Parameter files ----------------------------------------------------------

/// Parameters plus the unit convention their Coulomb maps were stored in.
/// In-memory parameters are always in force units; "volts" files carry the
/// breakaway maps as measured (divided by the axis gain).
struct ParamsFile {
    CraneParams params;
    std::string coulomb_convention = "volts";  ///< "volts" or "newtons"
    EncoderSpec encoder;
    bool complete = true;  ///< false for partial estimation output
};

ParamsFile load_params_file(const std::filesystem::path& path);
void save_params_file(const ParamsFile& pf, const std::filesystem::path& path);

// --- Scenario files -------------------------------------------------------------

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);
/// Canonical serialized form with all defaults materialized (golden-file
/// stability check).
std::string scenario_to_text(const Scenario& sc);

// --- Dataset directories -----------------------------------------------------------

/// Writes records, the breakaway table and a manifest.json into `dir`.
void save_dataset(const SynthSuite& suite, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// Campaign configuration for the synthetic suite generator (all keys
/// optional; unknown keys rejected).
SuiteOptions load_suite_options(const std::filesystem::path& path);

// --- Estimation outputs ---------------------------------------------------------------

void save_estimated_params(const PipelineResult& res,
                           const std::filesystem::path& path);
void save_diagnostics(const PipelineResult& res, const std::filesystem::path& path);

} // namespace crane3d
