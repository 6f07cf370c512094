#pragma once

#include <vector>

#include "bioheat/cell_static.hpp"
#include "bioheat/geometry.hpp"
#include "bioheat/numerics.hpp"

namespace bioheat {

struct TimeGrid {
    double dt = 0.0;
    int steps = 0;
    double t_final() const { return dt * steps; }
};

void validate_time_grid(const TimeGrid& grid);

// Compact numbering of the blood cells.
struct BloodMap {
    std::vector<int> cells;  // compact -> grid cell
    std::vector<int> index;  // grid cell -> compact, -1 on tissue
};

BloodMap blood_map(const UnitCellGeometry& cell);

// Weight of the adjacent cell value in the interface face value once the
// Robin flux balance eliminates the face unknown:
//   face = kappa * cell + (1 - kappa) * datum,  kappa = 2 alpha_b / h over
//   (gamma + 2 alpha_b / h).
double robin_face_factor(double alpha_b, double gamma, double h);

// Spatial operator of the blood phase per unit cell: interior conduction plus
// the Robin face terms with the face value eliminated. `robin_unit` is the
// load produced by a unit interface datum, so a datum g contributes
// g * robin_unit to the right-hand side.
struct BloodCellSystem {
    BloodMap map;
    SparseOperator reaction;
    std::vector<double> robin_unit;
    double face_conductance = 0.0;  // gamma * kappa, flux per unit face area
};

BloodCellSystem build_blood_cell_system(const UnitCellGeometry& cell, double alpha_b,
                                        double gamma);

// One backward-Euler sweep of (1/dt + reaction) u = u_prev/dt + load. The
// system must outlive the stepper.
class BloodCellStepper {
public:
    BloodCellStepper(const BloodCellSystem& sys, const TimeGrid& time);
    std::vector<double> advance(const std::vector<double>& prev,
                                const std::vector<double>& load) const;

private:
    TimeGrid time_;
    SparseOperator matrix_;
};

// Integral of gamma * (face value) over the interface for one blood field,
// with the Robin-eliminated face value against the given datum.
double interface_flux_value(const UnitCellGeometry& cell, const BloodMap& map,
                            const std::vector<double>& field, double gamma, double kappa,
                            double datum);

// Backward-Euler evolution of the blood phase per unit cell, one field per
// time index on the compact blood numbering. The three canonical responses:
//   decay:        unit initial data, zero interface datum      (1 -> 0)
//   saturation:   zero initial data, unit interface datum      (0 -> 1)
//   accumulation: zero initial data, unit volumetric source
std::vector<std::vector<double>> solve_decay(const UnitCellGeometry& cell, double alpha_b,
                                             double gamma, const TimeGrid& time);
std::vector<std::vector<double>> solve_saturation(const UnitCellGeometry& cell, double alpha_b,
                                                  double gamma, const TimeGrid& time);
std::vector<std::vector<double>> solve_accumulation(const UnitCellGeometry& cell, double alpha_b,
                                                    double gamma, const TimeGrid& time);

// Integral of gamma * (field trace) over the interface per time index. Solved
// states use the Robin-eliminated face value; index 0 uses the trace of the
// (constant) initial data so the series starts from the true initial state.
std::vector<double> interface_flux_series(const UnitCellGeometry& cell, const BloodMap& map,
                                          const std::vector<std::vector<double>>& series,
                                          double alpha_b, double gamma, double datum,
                                          double initial_value);

// Relaxation kernel: interface integral of gamma * (rate of the saturation
// trace), divided by the tissue volume; index 0 repeats the forward
// difference at t = 0.
KernelSamples memory_kernel(const UnitCellGeometry& cell,
                            const std::vector<std::vector<double>>& saturation, double alpha_b,
                            double gamma, double vol_tissue, const TimeGrid& time);

// Streaming solve of all three responses with scalar reductions only; full
// fields are retained on request.
struct CellTransientSeries {
    TimeGrid time;
    BloodMap map;
    KernelSamples kernel;
    std::vector<double> exchange_flux;      // gamma * saturation trace integral
    std::vector<double> decay_flux;         // gamma * decay trace integral
    std::vector<double> accumulation_flux;  // gamma * accumulation trace integral
    std::vector<double> decay_mean, saturation_mean, accumulation_mean;
    double partition_defect = 0.0;       // max over time of |decay + saturation - 1|
    double monotonicity_defect = 0.0;    // worst step against the expected monotone trend
    double range_defect = 0.0;           // worst excursion of decay/saturation outside [0,1]
    double saturation_final_gap = 0.0;   // 1 - min saturation at the horizon
    std::vector<std::vector<double>> decay, saturation, accumulation;  // empty unless kept
};

CellTransientSeries solve_cell_transients(const UnitCellGeometry& cell,
                                          const PhysicalParams& params, const TimeGrid& time,
                                          bool keep_fields = false);

}  // namespace bioheat
