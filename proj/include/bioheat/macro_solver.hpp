#pragma once

#include <array>
#include <span>
#include <vector>

#include "bioheat/cell_transient.hpp"
#include "bioheat/numerics.hpp"

namespace bioheat {

// Cell-centered grid on Omega = (0,1)^d with a homogeneous Dirichlet wall.
struct MacroGrid {
    int dim = 2;
    int m = 0;  // cells per side

    int cell_count() const { return dim == 2 ? m * m : m * m * m; }
    double spacing() const { return 1.0 / m; }
    std::array<int, 3> coords(int cell) const;
    int linear_index(const std::array<int, 3>& c) const;
    std::array<double, 3> cell_center(int cell) const;
};

MacroGrid make_macro_grid(int m, int dim);

// Data for one evolution run. `source` holds one field per time index; the
// backward-Euler step at t_{k+1} reads source[k+1] while the memory term is
// lagged and only consumes states up to t_k. An empty kernel value list turns
// the memory term off.
struct MacroProblem {
    MacroGrid grid;
    std::array<double, 9> diffusion{};  // row-major dim x dim, already scaled
    double gamma_eff = 0.0;
    KernelSamples kernel;
    TimeGrid time;
    std::vector<double> initial;
    std::vector<std::vector<double>> source;
};

struct MacroTrajectory {
    TimeGrid time;
    std::vector<std::vector<double>> states;  // size steps + 1
};

// Per-volume operator -div(D grad .) + gamma_eff with two-point fluxes, a
// ghost-cell Dirichlet wall, and odd-reflection cross stencils for the
// off-diagonal tensor entries.
SparseOperator assemble_macro_operator(const MacroGrid& grid,
                                       const std::array<double, 9>& diffusion, double gamma_eff);

MacroTrajectory solve_macro(const MacroProblem& problem);

// Exchange source: f + (decay_flux * h_b + accumulation_flux * f_b) / vol_tissue
// per time index. Pass all-zero flux series for a cell without a blood phase.
std::vector<std::vector<double>> assemble_macro_source(
    std::span<const double> f, std::span<const double> h_b, std::span<const double> f_b,
    const std::vector<double>& decay_flux, const std::vector<double>& accumulation_flux,
    double vol_tissue);

// Blood-phase mean of the reconstructed blood temperature for every macro
// cell and time index: decay_mean * h_b + (saturation-rate (*) T) + f_b *
// accumulation_mean, with the rate convolved against the macro history by the
// trapezoid rule (forward difference at lag zero).
std::vector<std::vector<double>> reconstruct_blood_mean(const MacroTrajectory& macro,
                                                        std::span<const double> h_b,
                                                        std::span<const double> f_b,
                                                        const std::vector<double>& decay_mean,
                                                        const std::vector<double>& saturation_mean,
                                                        const std::vector<double>& accumulation_mean);

// Fully resolved reconstruction at a single macro location with prescribed
// history; one field over the blood cells per time index.
std::vector<std::vector<double>> reconstruct_blood_point(
    std::span<const double> history, double dt, double h_b, double f_b,
    const std::vector<std::vector<double>>& decay,
    const std::vector<std::vector<double>>& saturation,
    const std::vector<std::vector<double>>& accumulation);

}  // namespace bioheat
