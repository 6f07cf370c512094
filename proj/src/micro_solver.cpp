#include "bioheat/micro_solver.hpp"

#include <algorithm>
#include <cmath>

#include "bioheat/errors.hpp"

namespace bioheat {

SparseOperator assemble_micro_operator(const MicroGrid& grid, const PhysicalParams& params,
                                       InterfaceScheme scheme) {
    if (!(params.alpha > 0.0)) throw ValidationError("physics.alpha: must be positive");
    if (!(params.alpha_b > 0.0)) throw ValidationError("physics.alpha_b: must be positive");
    if (params.gamma < 0.0) throw ValidationError("physics.gamma: must be non-negative");

    const double eps = grid.eps();
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const double tissue = params.alpha * inv_h2;
    const double blood = eps * eps * params.alpha_b * inv_h2;

    // Exchange conductance per unit face area.
    double barrier = eps * params.gamma;
    if (scheme == InterfaceScheme::halfcell && barrier > 0.0) {
        const double half = 0.5 * h;
        barrier = 1.0 / (1.0 / barrier + half / params.alpha +
                         half / (eps * eps * params.alpha_b));
    }
    const double exchange = barrier / h;

    std::vector<Triplet> entries;
    for (int c = 0; c < grid.cell_count(); ++c) {
        const bool c_tissue = grid.phase(c) == kTissuePhase;
        for (int a = 0; a < grid.dim(); ++a) {
            const int nb = grid.neighbor(c, a, +1);
            if (nb < 0) continue;
            const bool nb_tissue = grid.phase(nb) == kTissuePhase;
            double g;
            if (c_tissue && nb_tissue)
                g = tissue;
            else if (!c_tissue && !nb_tissue)
                g = blood;
            else
                g = exchange;
            if (g == 0.0) continue;
            entries.push_back({c, c, g});
            entries.push_back({nb, nb, g});
            entries.push_back({c, nb, -g});
            entries.push_back({nb, c, -g});
        }
        // Dirichlet wall; blood cells never touch it.
        const std::array<int, 3> cc = grid.coords(c);
        for (int a = 0; a < grid.dim(); ++a) {
            int wall_faces = 0;
            if (cc[a] == 0) ++wall_faces;
            if (cc[a] == grid.cells_per_side() - 1) ++wall_faces;
            if (wall_faces > 0) entries.push_back({c, c, wall_faces * 2.0 * tissue});
        }
    }
    return SparseOperator::from_triplets(grid.cell_count(), std::move(entries));
}

MicroTrajectory solve_micro(const MicroGrid& grid, const SparseOperator& op,
                            const MicroData& data, const TimeGrid& time) {
    validate_time_grid(time);
    const int total = grid.cell_count();
    if (op.size() != total || static_cast<int>(data.source.size()) != total ||
        static_cast<int>(data.initial.size()) != total)
        throw ValidationError("micro: field size mismatch");

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(total) + op.nonzeros());
    for (int r = 0; r < total; ++r) entries.push_back({r, r, 1.0 / time.dt});
    const auto offs = op.row_offsets();
    const auto cols = op.columns();
    const auto vals = op.values();
    for (int r = 0; r < total; ++r)
        for (int k = offs[r]; k < offs[r + 1]; ++k)
            entries.push_back({r, cols[static_cast<std::size_t>(k)],
                               vals[static_cast<std::size_t>(k)]});
    const SparseOperator matrix = SparseOperator::from_triplets(total, std::move(entries));

    MicroTrajectory traj;
    traj.time = time;
    traj.states.reserve(static_cast<std::size_t>(time.steps) + 1);
    traj.states.push_back(data.initial);

    std::vector<double> rhs(static_cast<std::size_t>(total));
    for (int k = 0; k < time.steps; ++k) {
        const std::vector<double>& prev = traj.states.back();
        for (int i = 0; i < total; ++i)
            rhs[static_cast<std::size_t>(i)] =
                prev[static_cast<std::size_t>(i)] / time.dt + data.source[static_cast<std::size_t>(i)];
        traj.states.push_back(cg_solve(matrix, rhs, {}, nullptr, prev));
    }
    return traj;
}

namespace {

// Squared eps-weighted seminorm: phase-wise face gradients (outer wall
// excluded) plus the eps-weighted interface jump term.
double v_seminorm_sq(const MicroGrid& grid, const std::vector<double>& state) {
    const double eps = grid.eps();
    const double h = grid.spacing();
    const double vol = grid.cell_volume();
    const double face = grid.face_area();
    double tissue_grad = 0.0, blood_grad = 0.0, jump = 0.0;
    for (int c = 0; c < grid.cell_count(); ++c) {
        const bool c_tissue = grid.phase(c) == kTissuePhase;
        for (int a = 0; a < grid.dim(); ++a) {
            const int nb = grid.neighbor(c, a, +1);
            if (nb < 0) continue;
            const double d = state[static_cast<std::size_t>(nb)] - state[static_cast<std::size_t>(c)];
            const bool nb_tissue = grid.phase(nb) == kTissuePhase;
            if (c_tissue && nb_tissue)
                tissue_grad += (d / h) * (d / h) * vol;
            else if (!c_tissue && !nb_tissue)
                blood_grad += (d / h) * (d / h) * vol;
            else
                jump += d * d * face;
        }
    }
    return tissue_grad + eps * eps * blood_grad + eps * jump;
}

}  // namespace

EnergyReport energy_norms(const MicroGrid& grid, const MicroTrajectory& traj) {
    EnergyReport report;
    const double vol = grid.cell_volume();
    std::vector<double> v_sq(traj.states.size(), 0.0);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const std::vector<double>& state = traj.states[k];
        double h_sq = 0.0;
        for (double x : state) h_sq += x * x * vol;
        report.sup_h_sq = std::max(report.sup_h_sq, h_sq);
        v_sq[k] = v_seminorm_sq(grid, state);
    }
    for (std::size_t k = 0; k < v_sq.size(); ++k) {
        const double w = (k == 0 || k + 1 == v_sq.size()) ? 0.5 : 1.0;
        report.time_int_v_sq += w * v_sq[k] * traj.time.dt;
    }
    return report;
}

}  // namespace bioheat
