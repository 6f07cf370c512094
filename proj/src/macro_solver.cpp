#include "bioheat/macro_solver.hpp"

#include <algorithm>
#include <cmath>

#include "bioheat/errors.hpp"

namespace bioheat {

std::array<int, 3> MacroGrid::coords(int cell) const {
    std::array<int, 3> c{0, 0, 0};
    c[0] = cell % m;
    cell /= m;
    c[1] = cell % m;
    if (dim == 3) c[2] = cell / m;
    return c;
}

int MacroGrid::linear_index(const std::array<int, 3>& c) const {
    return c[0] + m * (c[1] + m * c[2]);
}

std::array<double, 3> MacroGrid::cell_center(int cell) const {
    const std::array<int, 3> c = coords(cell);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = (c[a] + 0.5) * spacing();
    return x;
}

MacroGrid make_macro_grid(int m, int dim) {
    if (dim != 2 && dim != 3) throw ValidationError("macro: dimension must be 2 or 3");
    if (m < 1) throw ValidationError("macro.M: must be at least 1");
    return MacroGrid{dim, m};
}

namespace {

// Ghost lookup with the homogeneous Dirichlet wall: an index one step outside
// mirrors the boundary cell with flipped sign (odd extension about the wall).
bool ghost_resolve(const MacroGrid& grid, std::array<int, 3> c, int* cell, double* sign) {
    double s = 1.0;
    for (int a = 0; a < grid.dim; ++a) {
        if (c[a] == -1) {
            c[a] = 0;
            s = -s;
        } else if (c[a] == grid.m) {
            c[a] = grid.m - 1;
            s = -s;
        } else if (c[a] < 0 || c[a] > grid.m) {
            return false;
        }
    }
    *cell = grid.linear_index(c);
    *sign = s;
    return true;
}

}  // namespace

SparseOperator assemble_macro_operator(const MacroGrid& grid,
                                       const std::array<double, 9>& diffusion, double gamma_eff) {
    const int dim = grid.dim;
    const int total = grid.cell_count();
    if (gamma_eff < 0.0) throw ValidationError("macro: gamma_eff must be non-negative");
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);

    std::vector<Triplet> entries;
    for (int c = 0; c < total; ++c) {
        entries.push_back({c, c, gamma_eff});
        const std::array<int, 3> cc = grid.coords(c);
        for (int a = 0; a < dim; ++a) {
            const double d_aa = diffusion[static_cast<std::size_t>(3 * a + a)];
            if (!(d_aa > 0.0)) throw ValidationError("macro: diffusion diagonal must be positive");
            for (int dir : {-1, +1}) {
                std::array<int, 3> nc = cc;
                nc[a] += dir;
                if (nc[a] < 0 || nc[a] >= grid.m) {
                    entries.push_back({c, c, 2.0 * d_aa * inv_h2});
                } else {
                    entries.push_back({c, c, d_aa * inv_h2});
                    entries.push_back({c, grid.linear_index(nc), -d_aa * inv_h2});
                }
            }
        }
        for (int a = 0; a < dim; ++a) {
            for (int b = a + 1; b < dim; ++b) {
                const double d_ab = 0.5 * (diffusion[static_cast<std::size_t>(3 * a + b)] +
                                           diffusion[static_cast<std::size_t>(3 * b + a)]);
                if (d_ab == 0.0) continue;
                const double w = 0.5 * d_ab * inv_h2;
                for (int sa : {-1, +1}) {
                    for (int sb : {-1, +1}) {
                        std::array<int, 3> nc = cc;
                        nc[a] += sa;
                        nc[b] += sb;
                        int nb_cell = 0;
                        double sign = 1.0;
                        if (!ghost_resolve(grid, nc, &nb_cell, &sign)) continue;
                        // Split between the two transposed slots: the ghost
                        // fold is one-sided, and CG needs the sum symmetric.
                        const double v = -0.5 * w * sa * sb * sign;
                        entries.push_back({c, nb_cell, v});
                        entries.push_back({nb_cell, c, v});
                    }
                }
            }
        }
    }
    return SparseOperator::from_triplets(total, std::move(entries));
}

MacroTrajectory solve_macro(const MacroProblem& problem) {
    validate_time_grid(problem.time);
    const int total = problem.grid.cell_count();
    if (static_cast<int>(problem.initial.size()) != total)
        throw ValidationError("macro: initial field size mismatch");
    if (problem.source.size() != static_cast<std::size_t>(problem.time.steps) + 1)
        throw ValidationError("macro: need one source field per time index");
    for (const std::vector<double>& s : problem.source)
        if (static_cast<int>(s.size()) != total)
            throw ValidationError("macro: source field size mismatch");
    const bool with_memory =
        std::any_of(problem.kernel.values.begin(), problem.kernel.values.end(),
                    [](double v) { return v != 0.0; });
    if (with_memory) {
        if (problem.kernel.values.size() < static_cast<std::size_t>(problem.time.steps) + 1)
            throw ValidationError("macro: kernel shorter than the time grid");
        const double rel = std::abs(problem.kernel.dt - problem.time.dt) / problem.time.dt;
        if (rel > 1e-12) throw ValidationError("macro: kernel step does not match the time grid");
    }

    const SparseOperator spatial =
        assemble_macro_operator(problem.grid, problem.diffusion, problem.gamma_eff);
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(total) + spatial.nonzeros());
    for (int r = 0; r < total; ++r) entries.push_back({r, r, 1.0 / problem.time.dt});
    const auto offs = spatial.row_offsets();
    const auto cols = spatial.columns();
    const auto vals = spatial.values();
    for (int r = 0; r < total; ++r)
        for (int k = offs[r]; k < offs[r + 1]; ++k)
            entries.push_back({r, cols[static_cast<std::size_t>(k)],
                               vals[static_cast<std::size_t>(k)]});
    const SparseOperator matrix = SparseOperator::from_triplets(total, std::move(entries));

    MacroTrajectory traj;
    traj.time = problem.time;
    traj.states.reserve(static_cast<std::size_t>(problem.time.steps) + 1);
    traj.states.push_back(problem.initial);

    std::vector<double> rhs(static_cast<std::size_t>(total));
    std::vector<double> memory(static_cast<std::size_t>(total), 0.0);
    for (int k = 0; k < problem.time.steps; ++k) {
        const std::vector<double>& prev = traj.states.back();
        const std::vector<double>& load = problem.source[static_cast<std::size_t>(k) + 1];
        if (with_memory)
            convolve_trapezoid_fields(problem.kernel, traj.states, static_cast<std::size_t>(k),
                                      memory);
        for (int i = 0; i < total; ++i) {
            rhs[static_cast<std::size_t>(i)] = prev[static_cast<std::size_t>(i)] / problem.time.dt +
                                               load[static_cast<std::size_t>(i)];
            if (with_memory) rhs[static_cast<std::size_t>(i)] += memory[static_cast<std::size_t>(i)];
        }
        traj.states.push_back(cg_solve(matrix, rhs, {}, nullptr, prev));
    }
    return traj;
}

std::vector<std::vector<double>> assemble_macro_source(
    std::span<const double> f, std::span<const double> h_b, std::span<const double> f_b,
    const std::vector<double>& decay_flux, const std::vector<double>& accumulation_flux,
    double vol_tissue) {
    if (h_b.size() != f.size() || f_b.size() != f.size())
        throw ValidationError("macro source: data field sizes differ");
    if (decay_flux.size() != accumulation_flux.size())
        throw ValidationError("macro source: flux series lengths differ");
    if (!(vol_tissue > 0.0)) throw ValidationError("macro source: empty tissue phase");

    std::vector<std::vector<double>> source(decay_flux.size());
    for (std::size_t k = 0; k < decay_flux.size(); ++k) {
        const double wd = decay_flux[k] / vol_tissue;
        const double wa = accumulation_flux[k] / vol_tissue;
        std::vector<double>& out = source[k];
        out.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + wd * h_b[i] + wa * f_b[i];
    }
    return source;
}

namespace {

// Saturation rate with the forward difference repeated at lag zero.
std::vector<double> rate_series(const std::vector<double>& samples, double dt) {
    std::vector<double> rate(samples.size(), 0.0);
    for (std::size_t k = 1; k < samples.size(); ++k) rate[k] = (samples[k] - samples[k - 1]) / dt;
    if (rate.size() > 1) rate[0] = rate[1];
    return rate;
}

}  // namespace

std::vector<std::vector<double>> reconstruct_blood_mean(const MacroTrajectory& macro,
                                                        std::span<const double> h_b,
                                                        std::span<const double> f_b,
                                                        const std::vector<double>& decay_mean,
                                                        const std::vector<double>& saturation_mean,
                                                        const std::vector<double>& accumulation_mean) {
    const std::size_t count = macro.states.size();
    if (decay_mean.size() != count || saturation_mean.size() != count ||
        accumulation_mean.size() != count)
        throw ValidationError("blood reconstruction: series lengths do not match the trajectory");
    const std::size_t cells = macro.states.front().size();
    if (h_b.size() != cells || f_b.size() != cells)
        throw ValidationError("blood reconstruction: data field size mismatch");

    KernelSamples rate;
    rate.dt = macro.time.dt;
    rate.values = rate_series(saturation_mean, macro.time.dt);

    std::vector<std::vector<double>> blood(count);
    std::vector<double> conv(cells, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        convolve_trapezoid_fields(rate, macro.states, k, conv);
        std::vector<double>& out = blood[k];
        out.resize(cells);
        for (std::size_t i = 0; i < cells; ++i)
            out[i] = decay_mean[k] * h_b[i] + conv[i] + f_b[i] * accumulation_mean[k];
    }
    return blood;
}

std::vector<std::vector<double>> reconstruct_blood_point(
    std::span<const double> history, double dt, double h_b, double f_b,
    const std::vector<std::vector<double>>& decay,
    const std::vector<std::vector<double>>& saturation,
    const std::vector<std::vector<double>>& accumulation) {
    const std::size_t count = history.size();
    if (decay.size() != count || saturation.size() != count || accumulation.size() != count)
        throw ValidationError("blood reconstruction: series lengths do not match the history");
    if (count == 0) return {};
    const std::size_t cells = decay.front().size();

    // Per-cell saturation rates, time-major.
    std::vector<std::vector<double>> rate(count, std::vector<double>(cells, 0.0));
    for (std::size_t k = 1; k < count; ++k)
        for (std::size_t i = 0; i < cells; ++i)
            rate[k][i] = (saturation[k][i] - saturation[k - 1][i]) / dt;
    if (count > 1) rate[0] = rate[1];

    std::vector<std::vector<double>> blood(count, std::vector<double>(cells, 0.0));
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double>& out = blood[k];
        for (std::size_t i = 0; i < cells; ++i)
            out[i] = decay[k][i] * h_b + f_b * accumulation[k][i];
        if (k == 0) continue;
        for (std::size_t j = 0; j <= k; ++j) {
            const double w = (j == 0 || j == k) ? 0.5 : 1.0;
            const double t_val = w * history[j] * dt;
            const std::vector<double>& r = rate[k - j];
            for (std::size_t i = 0; i < cells; ++i) out[i] += t_val * r[i];
        }
    }
    return blood;
}

}  // namespace bioheat
