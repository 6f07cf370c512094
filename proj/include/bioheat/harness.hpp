#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bioheat/config.hpp"
#include "bioheat/macro_solver.hpp"
#include "bioheat/micro_solver.hpp"

namespace bioheat {

// Full unit-cell pipeline: static correctors plus the transient responses,
// with the invariant diagnostics evaluated on the way.
struct CellReport {
    UnitCellGeometry cell;
    PhysicalParams params;
    EffectiveCoefficients eff;
    CellTransientSeries transients;

    double symmetry_residual = 0.0;  // max |a_ij - a_ji| relative to max |a_ij|
    double eig_min = 0.0, eig_max = 0.0;
    double kernel_integral = 0.0;          // trapezoid over the configured horizon
    double kernel_integral_rel_gap = 0.0;  // |integral - gamma_eff| / gamma_eff
};

CellReport run_cell_report(const RunConfig& cfg);
std::string cell_report_json(const CellReport& report);

// Homogenized evolution driven by the cell report's coefficients and kernel.
struct MacroRun {
    MacroGrid grid;
    MacroTrajectory trajectory;
    double seconds = 0.0;
};

MacroRun run_macro(const RunConfig& cfg, const CellReport& cell);

// Blood-phase mean of the reconstructed blood temperature for every macro
// cell and step of an existing run.
std::vector<std::vector<double>> blood_mean_trajectory(const RunConfig& cfg,
                                                       const CellReport& cell,
                                                       const MacroRun& macro);

// Resolved two-phase run on the tiled geometry, eps = 1 / tiles.
struct MicroRun {
    int tiles = 0;
    MicroTrajectory trajectory;
    EnergyReport energy;
    double seconds = 0.0;
};

MicroRun run_micro(const RunConfig& cfg, const UnitCellGeometry& cell, int tiles);

// One sweep entry: resolved-vs-homogenized distances in relative L2 over
// space and time on the shared coarse grid, plus the energy functionals.
struct StudyRow {
    double eps = 0.0;
    double e_tissue = 0.0;
    double e_blood = 0.0;
    double energy_h = 0.0;
    double energy_v = 0.0;
    double t_micro = 0.0;
    double t_macro = 0.0;
};

struct StudyReport {
    std::vector<StudyRow> rows;  // sorted by decreasing eps
    KernelSamples kernel;
};

StudyReport run_convergence_study(const RunConfig& cfg);
std::string study_csv(const StudyReport& report);

// Trajectory dumps shared by the macro and micro runs: one scalar per grid
// cell per step. CSV rows are (t, ix, iy[, iz], value); the binary layout is
// the magic line "BHTRJ01\n", int32 dim/side/steps, f64 dt, then the frames
// as native row-major f64.
std::string trajectory_csv(int dim, int side, const TimeGrid& time,
                           const std::vector<std::vector<double>>& states);
std::vector<std::uint8_t> trajectory_binary(int dim, int side, const TimeGrid& time,
                                            const std::vector<std::vector<double>>& states);
void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

// Verb drivers behind the CLI: validate, run, and emit the files selected by
// the output configuration into cfg.out_dir.
void drive_cell_report(const RunConfig& cfg);
void drive_macro_run(const RunConfig& cfg, const std::string& format);
void drive_micro_run(const RunConfig& cfg, double epsilon, const std::string& format);
void drive_study(const RunConfig& cfg);

}  // namespace bioheat
