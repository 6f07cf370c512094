#pragma once

#include <vector>

#include "bioheat/cell_static.hpp"
#include "bioheat/cell_transient.hpp"
#include "bioheat/geometry.hpp"
#include "bioheat/numerics.hpp"

namespace bioheat {

// Interface flux closure for the resolved run: `cell` couples the two
// adjacent cell values through eps * gamma directly, `halfcell` puts the
// half-cell conduction resistances of both phases in series with the barrier.
enum class InterfaceScheme { cell, halfcell };

// Per-cell data sampled on the micro grid: tissue cells carry f and h, blood
// cells carry f_b and h_b.
struct MicroData {
    std::vector<double> source;
    std::vector<double> initial;
};

// Per-volume spatial operator: alpha on the tissue phase, eps^2 alpha_b on
// the blood phase, eps gamma across the interface, Dirichlet wall via ghosts.
SparseOperator assemble_micro_operator(const MicroGrid& grid, const PhysicalParams& params,
                                       InterfaceScheme scheme = InterfaceScheme::cell);

struct MicroTrajectory {
    TimeGrid time;
    std::vector<std::vector<double>> states;  // size steps + 1
};

MicroTrajectory solve_micro(const MicroGrid& grid, const SparseOperator& op,
                            const MicroData& data, const TimeGrid& time);

// sup over time of the squared phase-wise L2 norm, and the time integral
// (trapezoid) of the squared eps-weighted gradient/interface seminorm.
struct EnergyReport {
    double sup_h_sq = 0.0;
    double time_int_v_sq = 0.0;
};

EnergyReport energy_norms(const MicroGrid& grid, const MicroTrajectory& traj);

}  // namespace bioheat
