#include "bioheat/cell_transient.hpp"

#include <algorithm>
#include <cmath>

#include "bioheat/errors.hpp"

namespace bioheat {

void validate_time_grid(const TimeGrid& grid) {
    if (!(grid.dt > 0.0)) throw ValidationError("time: step must be positive");
    if (grid.steps < 1) throw ValidationError("time.steps: must be at least 1");
}

BloodMap blood_map(const UnitCellGeometry& cell) {
    BloodMap map;
    map.index.assign(static_cast<std::size_t>(cell.cell_count()), -1);
    for (int c = 0; c < cell.cell_count(); ++c) {
        if (cell.phase(c) != kBloodPhase) continue;
        map.index[static_cast<std::size_t>(c)] = static_cast<int>(map.cells.size());
        map.cells.push_back(c);
    }
    return map;
}

double robin_face_factor(double alpha_b, double gamma, double h) {
    const double half_cell = 2.0 * alpha_b / h;
    return half_cell / (gamma + half_cell);
}

// Reaction operator: interior conduction plus the Robin face terms with the
// face value eliminated through the half-cell flux balance.
BloodCellSystem build_blood_cell_system(const UnitCellGeometry& cell, double alpha_b,
                                        double gamma) {
    if (!(alpha_b > 0.0)) throw ValidationError("physics.alpha_b: must be positive");
    if (gamma < 0.0) throw ValidationError("physics.gamma: must be non-negative");

    BloodCellSystem sys;
    sys.map = blood_map(cell);
    const int unknowns = static_cast<int>(sys.map.cells.size());
    if (unknowns == 0) throw ValidationError("cell.inclusion: empty blood phase");

    const double h = cell.spacing();
    const double conduct = alpha_b / (h * h);
    const double kappa = robin_face_factor(alpha_b, gamma, h);
    sys.face_conductance = gamma * kappa;
    const double face_term = sys.face_conductance / h;

    std::vector<Triplet> entries;
    sys.robin_unit.assign(static_cast<std::size_t>(unknowns), 0.0);
    for (int c = 0; c < cell.cell_count(); ++c) {
        const int row = sys.map.index[static_cast<std::size_t>(c)];
        if (row < 0) continue;
        for (int a = 0; a < cell.dim(); ++a) {
            const int nb = cell.periodic_neighbor(c, a, +1);
            const int col = sys.map.index[static_cast<std::size_t>(nb)];
            if (col < 0) continue;
            entries.push_back({row, row, conduct});
            entries.push_back({col, col, conduct});
            entries.push_back({row, col, -conduct});
            entries.push_back({col, row, -conduct});
        }
    }
    for (const InterfaceFace& face : cell.interface_faces()) {
        const int row = sys.map.index[static_cast<std::size_t>(face.blood_cell)];
        entries.push_back({row, row, face_term});
        sys.robin_unit[static_cast<std::size_t>(row)] += face_term;
    }
    sys.reaction = SparseOperator::from_triplets(unknowns, std::move(entries));
    return sys;
}

BloodCellStepper::BloodCellStepper(const BloodCellSystem& sys, const TimeGrid& time)
    : time_(time) {
    const int n = sys.reaction.size();
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(n) + sys.reaction.nonzeros());
    for (int r = 0; r < n; ++r) entries.push_back({r, r, 1.0 / time.dt});
    const auto offs = sys.reaction.row_offsets();
    const auto cols = sys.reaction.columns();
    const auto vals = sys.reaction.values();
    for (int r = 0; r < n; ++r)
        for (int k = offs[r]; k < offs[r + 1]; ++k)
            entries.push_back({r, cols[static_cast<std::size_t>(k)],
                               vals[static_cast<std::size_t>(k)]});
    matrix_ = SparseOperator::from_triplets(n, std::move(entries));
}

std::vector<double> BloodCellStepper::advance(const std::vector<double>& prev,
                                              const std::vector<double>& load) const {
    const int n = matrix_.size();
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] =
        prev[static_cast<std::size_t>(i)] / time_.dt + load[static_cast<std::size_t>(i)];
    CgOptions opt;
    opt.tol = 1e-13;  // identities are checked to 1e-8 after many steps
    return cg_solve(matrix_, rhs, opt, nullptr, prev);
}

namespace {

std::vector<std::vector<double>> run_series(const UnitCellGeometry& cell, double alpha_b,
                                            double gamma, const TimeGrid& time, double initial,
                                            double datum, double volumetric) {
    validate_time_grid(time);
    const BloodCellSystem sys = build_blood_cell_system(cell, alpha_b, gamma);
    const BloodCellStepper stepper(sys, time);
    const std::size_t n = sys.map.cells.size();
    std::vector<double> load(n, volumetric);
    for (std::size_t i = 0; i < n; ++i) load[i] += datum * sys.robin_unit[i];

    std::vector<std::vector<double>> series;
    series.reserve(static_cast<std::size_t>(time.steps) + 1);
    series.emplace_back(n, initial);
    for (int k = 0; k < time.steps; ++k) series.push_back(stepper.advance(series.back(), load));
    return series;
}

}  // namespace

std::vector<std::vector<double>> solve_decay(const UnitCellGeometry& cell, double alpha_b,
                                             double gamma, const TimeGrid& time) {
    return run_series(cell, alpha_b, gamma, time, 1.0, 0.0, 0.0);
}

std::vector<std::vector<double>> solve_saturation(const UnitCellGeometry& cell, double alpha_b,
                                                  double gamma, const TimeGrid& time) {
    return run_series(cell, alpha_b, gamma, time, 0.0, 1.0, 0.0);
}

std::vector<std::vector<double>> solve_accumulation(const UnitCellGeometry& cell, double alpha_b,
                                                    double gamma, const TimeGrid& time) {
    return run_series(cell, alpha_b, gamma, time, 0.0, 0.0, 1.0);
}

double interface_flux_value(const UnitCellGeometry& cell, const BloodMap& map,
                            const std::vector<double>& field, double gamma, double kappa,
                            double datum) {
    double acc = 0.0;
    for (const InterfaceFace& face : cell.interface_faces()) {
        const int row = map.index[static_cast<std::size_t>(face.blood_cell)];
        const double face_value = kappa * field[static_cast<std::size_t>(row)] +
                                  (1.0 - kappa) * datum;
        acc += face_value;
    }
    return gamma * acc * cell.face_area();
}

std::vector<double> interface_flux_series(const UnitCellGeometry& cell, const BloodMap& map,
                                          const std::vector<std::vector<double>>& series,
                                          double alpha_b, double gamma, double datum,
                                          double initial_value) {
    const double kappa = robin_face_factor(alpha_b, gamma, cell.spacing());
    std::vector<double> flux(series.size(), 0.0);
    if (!series.empty())
        flux[0] = gamma * initial_value * cell.interface_area();
    for (std::size_t k = 1; k < series.size(); ++k)
        flux[k] = interface_flux_value(cell, map, series[k], gamma, kappa, datum);
    return flux;
}

KernelSamples memory_kernel(const UnitCellGeometry& cell,
                            const std::vector<std::vector<double>>& saturation, double alpha_b,
                            double gamma, double vol_tissue, const TimeGrid& time) {
    validate_time_grid(time);
    if (saturation.size() != static_cast<std::size_t>(time.steps) + 1)
        throw ValidationError("memory_kernel: series length does not match the time grid");
    if (!(vol_tissue > 0.0)) throw ValidationError("memory_kernel: empty tissue phase");
    const BloodMap map = blood_map(cell);
    const std::vector<double> flux =
        interface_flux_series(cell, map, saturation, alpha_b, gamma, 1.0, 0.0);
    KernelSamples kernel;
    kernel.dt = time.dt;
    kernel.values.assign(flux.size(), 0.0);
    for (std::size_t k = 1; k < flux.size(); ++k)
        kernel.values[k] = (flux[k] - flux[k - 1]) / (time.dt * vol_tissue);
    if (kernel.values.size() > 1) kernel.values[0] = kernel.values[1];
    return kernel;
}

CellTransientSeries solve_cell_transients(const UnitCellGeometry& cell,
                                          const PhysicalParams& params, const TimeGrid& time,
                                          bool keep_fields) {
    validate_time_grid(time);
    const BloodCellSystem sys = build_blood_cell_system(cell, params.alpha_b, params.gamma);
    const BloodCellStepper stepper(sys, time);
    const std::size_t n = sys.map.cells.size();
    const double kappa = robin_face_factor(params.alpha_b, params.gamma, cell.spacing());

    CellTransientSeries out;
    out.time = time;
    out.map = sys.map;

    std::vector<double> decay(n, 1.0), saturation(n, 0.0), accumulation(n, 0.0);
    const std::vector<double> no_load(n, 0.0);
    std::vector<double> unit_source(n, 1.0);

    const std::size_t count = static_cast<std::size_t>(time.steps) + 1;
    out.exchange_flux.reserve(count);
    out.decay_flux.reserve(count);
    out.accumulation_flux.reserve(count);
    out.decay_mean.reserve(count);
    out.saturation_mean.reserve(count);
    out.accumulation_mean.reserve(count);

    auto mean = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };

    // Index 0 carries the initial traces: decay 1, saturation 0, accumulation 0.
    out.exchange_flux.push_back(0.0);
    out.decay_flux.push_back(params.gamma * cell.interface_area());
    out.accumulation_flux.push_back(0.0);
    out.decay_mean.push_back(1.0);
    out.saturation_mean.push_back(0.0);
    out.accumulation_mean.push_back(0.0);
    if (keep_fields) {
        out.decay.push_back(decay);
        out.saturation.push_back(saturation);
        out.accumulation.push_back(accumulation);
    }

    for (int k = 1; k <= time.steps; ++k) {
        std::vector<double> decay_next = stepper.advance(decay, no_load);
        std::vector<double> saturation_next = stepper.advance(saturation, sys.robin_unit);
        std::vector<double> accumulation_next = stepper.advance(accumulation, unit_source);

        for (std::size_t i = 0; i < n; ++i) {
            const double d = decay_next[i], s = saturation_next[i];
            out.partition_defect = std::max(out.partition_defect, std::abs(d + s - 1.0));
            out.monotonicity_defect =
                std::max({out.monotonicity_defect, d - decay[i], saturation[i] - s});
            out.range_defect = std::max({out.range_defect, -d, d - 1.0, -s, s - 1.0});
        }

        decay.swap(decay_next);
        saturation.swap(saturation_next);
        accumulation.swap(accumulation_next);

        out.exchange_flux.push_back(interface_flux_value(cell, sys.map, saturation, params.gamma, kappa, 1.0));
        out.decay_flux.push_back(interface_flux_value(cell, sys.map, decay, params.gamma, kappa, 0.0));
        out.accumulation_flux.push_back(
            interface_flux_value(cell, sys.map, accumulation, params.gamma, kappa, 0.0));
        out.decay_mean.push_back(mean(decay));
        out.saturation_mean.push_back(mean(saturation));
        out.accumulation_mean.push_back(mean(accumulation));
        if (keep_fields) {
            out.decay.push_back(decay);
            out.saturation.push_back(saturation);
            out.accumulation.push_back(accumulation);
        }
    }

    out.saturation_final_gap = 1.0 - *std::min_element(saturation.begin(), saturation.end());

    out.kernel.dt = time.dt;
    out.kernel.values.assign(count, 0.0);
    for (std::size_t k = 1; k < count; ++k)
        out.kernel.values[k] = (out.exchange_flux[k] - out.exchange_flux[k - 1]) /
                               (time.dt * cell.vol_tissue());
    if (count > 1) out.kernel.values[0] = out.kernel.values[1];
    return out;
}

}  // namespace bioheat
