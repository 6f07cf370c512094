#include "bioheat/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bioheat/errors.hpp"
#include "bioheat/plots.hpp"
#include "json.hpp"

namespace bioheat {

namespace {

using ordered_json = nlohmann::ordered_json;

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double trapezoid_integral(const KernelSamples& kernel) {
    if (kernel.values.size() < 2) return 0.0;
    double sum = 0.5 * (kernel.values.front() + kernel.values.back());
    for (std::size_t k = 1; k + 1 < kernel.values.size(); ++k) sum += kernel.values[k];
    return sum * kernel.dt;
}

// Stand-in series for a cell without a blood phase: every response and trace
// integral vanishes identically.
CellTransientSeries zero_transients(const TimeGrid& time) {
    CellTransientSeries out;
    out.time = time;
    const std::size_t count = static_cast<std::size_t>(time.steps) + 1;
    out.kernel.dt = time.dt;
    out.kernel.values.assign(count, 0.0);
    out.exchange_flux.assign(count, 0.0);
    out.decay_flux.assign(count, 0.0);
    out.accumulation_flux.assign(count, 0.0);
    out.decay_mean.assign(count, 0.0);
    out.saturation_mean.assign(count, 0.0);
    out.accumulation_mean.assign(count, 0.0);
    return out;
}

std::vector<double> sample_macro(const ProfileSpec& spec, const MacroGrid& grid, int dim) {
    std::vector<double> out(static_cast<std::size_t>(grid.cell_count()));
    for (int c = 0; c < grid.cell_count(); ++c)
        out[static_cast<std::size_t>(c)] = evaluate_profile(spec, grid.cell_center(c), dim);
    return out;
}

std::string format_number(const char* fmt, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("output.out_dir: cannot create '" + cfg.out_dir + "'");
    return dir;
}

// Relative space-time L2 distances between the phase-wise tile averages of
// the resolved run and the homogenized references, accumulated with
// trapezoid weights in time on the shared m^d grid.
void accumulate_errors(const RunConfig& cfg, const MicroGrid& grid, const MicroTrajectory& traj,
                       const MacroTrajectory& macro,
                       const std::vector<std::vector<double>>& blood_mean, double vol_tissue,
                       double vol_blood, StudyRow& row) {
    const int k_tiles = grid.tiles_per_side();
    const int m = cfg.macro_m;
    const double cell_vol = std::pow(1.0 / m, cfg.dim);
    const double dt = traj.time.dt;
    double num_t = 0.0, den_t = 0.0, num_b = 0.0, den_b = 0.0;
    for (int k = 0; k <= traj.time.steps; ++k) {
        const double w = (k == 0 || k == traj.time.steps) ? 0.5 * dt : dt;
        const auto& state = traj.states[static_cast<std::size_t>(k)];
        const std::vector<double> tissue =
            block_restrict(cell_average(grid, state, kTissuePhase), cfg.dim, k_tiles, m);
        const std::vector<double> blood =
            block_restrict(cell_average(grid, state, kBloodPhase), cfg.dim, k_tiles, m);
        const auto& ref = macro.states[static_cast<std::size_t>(k)];
        const auto& ref_b = blood_mean[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < tissue.size(); ++c) {
            const double target_t = vol_tissue * ref[c];
            const double target_b = vol_blood * ref_b[c];
            num_t += w * cell_vol * (tissue[c] - target_t) * (tissue[c] - target_t);
            den_t += w * cell_vol * target_t * target_t;
            num_b += w * cell_vol * (blood[c] - target_b) * (blood[c] - target_b);
            den_b += w * cell_vol * target_b * target_b;
        }
    }
    row.e_tissue = den_t > 0.0 ? std::sqrt(num_t / den_t) : std::sqrt(num_t);
    row.e_blood = den_b > 0.0 ? std::sqrt(num_b / den_b) : std::sqrt(num_b);
}

}  // namespace

CellReport run_cell_report(const RunConfig& cfg) {
    CellReport rep;
    rep.cell = build_unit_cell(cfg.inclusions, cfg.n, cfg.dim);
    rep.params = cfg.resolved_physics();
    rep.eff = compute_effective_coefficients(rep.cell, rep.params);
    const TimeGrid time = cfg.time_grid();
    rep.transients = rep.cell.vol_blood() > 0.0 ? solve_cell_transients(rep.cell, rep.params, time)
                                                : zero_transients(time);

    const int d = cfg.dim;
    double largest = 0.0, asym = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            largest = std::max(largest, std::abs(rep.eff.tensor[static_cast<std::size_t>(3 * i + j)]));
            asym = std::max(asym, std::abs(rep.eff.tensor[static_cast<std::size_t>(3 * i + j)] -
                                           rep.eff.tensor[static_cast<std::size_t>(3 * j + i)]));
        }
    rep.symmetry_residual = largest > 0.0 ? asym / largest : 0.0;
    const std::vector<double> eigs = sym_eigenvalues(rep.eff.tensor, d);
    rep.eig_min = eigs.front();
    rep.eig_max = eigs.back();

    rep.kernel_integral = trapezoid_integral(rep.transients.kernel);
    rep.kernel_integral_rel_gap =
        rep.eff.gamma_eff > 0.0
            ? std::abs(rep.kernel_integral - rep.eff.gamma_eff) / rep.eff.gamma_eff
            : std::abs(rep.kernel_integral);
    return rep;
}

std::string cell_report_json(const CellReport& report) {
    const int d = report.eff.dim;
    ordered_json j;
    std::vector<double> tensor;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            tensor.push_back(report.eff.tensor[static_cast<std::size_t>(3 * i + k)]);
    j["A_eff"] = tensor;
    j["gamma_eff"] = report.eff.gamma_eff;
    j["vol_Y1"] = report.eff.vol_tissue;
    j["dt"] = report.transients.time.dt;
    j["H"] = report.transients.kernel.values;
    j["q"] = report.transients.exchange_flux;
    ordered_json diag;
    diag["symmetry_residual"] = report.symmetry_residual;
    diag["eig_min"] = report.eig_min;
    diag["eig_max"] = report.eig_max;
    diag["kernel_integral"] = report.kernel_integral;
    diag["kernel_integral_rel_gap"] = report.kernel_integral_rel_gap;
    diag["partition_defect"] = report.transients.partition_defect;
    diag["monotonicity_defect"] = report.transients.monotonicity_defect;
    diag["range_defect"] = report.transients.range_defect;
    diag["saturation_final_gap"] = report.transients.saturation_final_gap;
    j["diagnostics"] = diag;
    return j.dump(2) + "\n";
}

MacroRun run_macro(const RunConfig& cfg, const CellReport& cell) {
    MacroRun run;
    run.grid = make_macro_grid(cfg.macro_m, cfg.dim);

    MacroProblem prob;
    prob.grid = run.grid;
    prob.diffusion = cell.eff.tensor;
    if (cfg.diffusion_scaling == DiffusionScaling::derived)
        for (double& v : prob.diffusion) v /= cell.eff.vol_tissue;
    prob.gamma_eff = cell.eff.gamma_eff;
    prob.kernel = cell.transients.kernel;
    prob.time = cfg.time_grid();

    const std::vector<double> f = sample_macro(cfg.f, run.grid, cfg.dim);
    const std::vector<double> f_b = sample_macro(cfg.f_b, run.grid, cfg.dim);
    const std::vector<double> h = sample_macro(cfg.h, run.grid, cfg.dim);
    const std::vector<double> h_b = sample_macro(cfg.h_b, run.grid, cfg.dim);

    prob.initial = h;
    if (cfg.ic_scaling == IcScaling::paper)
        for (double& v : prob.initial) v *= cell.eff.vol_tissue;
    prob.source = assemble_macro_source(f, h_b, f_b, cell.transients.decay_flux,
                                        cell.transients.accumulation_flux, cell.eff.vol_tissue);

    const auto start = std::chrono::steady_clock::now();
    run.trajectory = solve_macro(prob);
    run.seconds = elapsed_seconds(start);
    return run;
}

std::vector<std::vector<double>> blood_mean_trajectory(const RunConfig& cfg,
                                                       const CellReport& cell,
                                                       const MacroRun& macro) {
    const std::vector<double> f_b = sample_macro(cfg.f_b, macro.grid, cfg.dim);
    const std::vector<double> h_b = sample_macro(cfg.h_b, macro.grid, cfg.dim);
    return reconstruct_blood_mean(macro.trajectory, h_b, f_b, cell.transients.decay_mean,
                                  cell.transients.saturation_mean,
                                  cell.transients.accumulation_mean);
}

MicroRun run_micro(const RunConfig& cfg, const UnitCellGeometry& cell, int tiles) {
    MicroRun run;
    run.tiles = tiles;
    const MicroGrid grid = tile_micro_domain(cell, tiles);
    const PhysicalParams params = cfg.resolved_physics();
    const SparseOperator op = assemble_micro_operator(grid, params, cfg.interface_scheme);

    MicroData data;
    data.source.resize(static_cast<std::size_t>(grid.cell_count()));
    data.initial.resize(static_cast<std::size_t>(grid.cell_count()));
    for (int c = 0; c < grid.cell_count(); ++c) {
        const auto x = grid.cell_center(c);
        const bool tissue = grid.phase(c) == kTissuePhase;
        data.source[static_cast<std::size_t>(c)] =
            evaluate_profile(tissue ? cfg.f : cfg.f_b, x, cfg.dim);
        data.initial[static_cast<std::size_t>(c)] =
            evaluate_profile(tissue ? cfg.h : cfg.h_b, x, cfg.dim);
    }

    const auto start = std::chrono::steady_clock::now();
    run.trajectory = solve_micro(grid, op, data, cfg.time_grid());
    run.seconds = elapsed_seconds(start);
    run.energy = energy_norms(grid, run.trajectory);
    return run;
}

namespace {

StudyReport sweep_report(const RunConfig& cfg, const CellReport& cell, const MacroRun& macro,
                         const std::vector<std::vector<double>>& blood_mean) {
    StudyReport report;
    report.kernel = cell.transients.kernel;

    std::vector<int> tiles = cfg.inv_eps;
    std::sort(tiles.begin(), tiles.end());
    for (int k : tiles) {
        const MicroRun micro = run_micro(cfg, cell.cell, k);
        const MicroGrid grid = tile_micro_domain(cell.cell, k);
        StudyRow row;
        row.eps = 1.0 / k;
        accumulate_errors(cfg, grid, micro.trajectory, macro.trajectory, blood_mean,
                          cell.eff.vol_tissue, cell.cell.vol_blood(), row);
        row.energy_h = micro.energy.sup_h_sq;
        row.energy_v = micro.energy.time_int_v_sq;
        row.t_micro = micro.seconds;
        row.t_macro = macro.seconds;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace

StudyReport run_convergence_study(const RunConfig& cfg) {
    const CellReport cell = run_cell_report(cfg);
    const MacroRun macro = run_macro(cfg, cell);
    return sweep_report(cfg, cell, macro, blood_mean_trajectory(cfg, cell, macro));
}

std::string study_csv(const StudyReport& report) {
    std::ostringstream out;
    out << "epsilon,e_tissue,e_blood,energy_H,energy_V,t_micro_sec,t_macro_sec\n";
    for (const StudyRow& row : report.rows) {
        out << format_number("%.12g", row.eps) << "," << format_number("%.12g", row.e_tissue)
            << "," << format_number("%.12g", row.e_blood) << ","
            << format_number("%.12g", row.energy_h) << "," << format_number("%.12g", row.energy_v)
            << "," << format_number("%.3f", row.t_micro) << ","
            << format_number("%.3f", row.t_macro) << "\n";
    }
    return out.str();
}

std::string trajectory_csv(int dim, int side, const TimeGrid& time,
                           const std::vector<std::vector<double>>& states) {
    std::ostringstream out;
    out << (dim == 2 ? "t,ix,iy,value\n" : "t,ix,iy,iz,value\n");
    for (int k = 0; k < static_cast<int>(states.size()); ++k) {
        const std::string t = format_number("%.12g", time.dt * k);
        const auto& state = states[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < state.size(); ++c) {
            const int ix = static_cast<int>(c) % side;
            const int iy = (static_cast<int>(c) / side) % side;
            out << t << "," << ix << "," << iy;
            if (dim == 3) out << "," << (static_cast<int>(c) / (side * side));
            out << "," << format_number("%.17g", state[c]) << "\n";
        }
    }
    return out.str();
}

std::vector<std::uint8_t> trajectory_binary(int dim, int side, const TimeGrid& time,
                                            const std::vector<std::vector<double>>& states) {
    std::vector<std::uint8_t> bytes;
    const char magic[8] = {'B', 'H', 'T', 'R', 'J', '0', '1', '\n'};
    auto push = [&bytes](const void* p, std::size_t len) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + len);
    };
    push(magic, sizeof magic);
    const std::int32_t header[3] = {static_cast<std::int32_t>(dim),
                                    static_cast<std::int32_t>(side),
                                    static_cast<std::int32_t>(states.size()) - 1};
    push(header, sizeof header);
    push(&time.dt, sizeof time.dt);
    for (const auto& state : states) push(state.data(), state.size() * sizeof(double));
    return bytes;
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void drive_cell_report(const RunConfig& cfg) {
    const CellReport rep = run_cell_report(cfg);
    const auto dir = ensure_out_dir(cfg);
    if (cfg.write_json) write_text_file((dir / "cell_report.json").string(), cell_report_json(rep));
    if (cfg.write_svg)
        write_text_file((dir / "kernel.svg").string(), render_kernel_plot(rep.transients.kernel));
    if (cfg.write_csv) {
        std::ostringstream out;
        out << "t,H,q\n";
        for (std::size_t k = 0; k < rep.transients.kernel.values.size(); ++k)
            out << format_number("%.12g", rep.transients.time.dt * static_cast<double>(k)) << ","
                << format_number("%.17g", rep.transients.kernel.values[k]) << ","
                << format_number("%.17g", rep.transients.exchange_flux[k]) << "\n";
        write_text_file((dir / "kernel.csv").string(), out.str());
    }
}

void drive_macro_run(const RunConfig& cfg, const std::string& format) {
    const CellReport rep = run_cell_report(cfg);
    const MacroRun run = run_macro(cfg, rep);
    const auto dir = ensure_out_dir(cfg);
    if (format == "csv") {
        write_text_file((dir / "macro_trajectory.csv").string(),
                        trajectory_csv(cfg.dim, cfg.macro_m, run.trajectory.time,
                                       run.trajectory.states));
    } else if (format == "binary") {
        write_binary_file((dir / "macro_trajectory.bin").string(),
                          trajectory_binary(cfg.dim, cfg.macro_m, run.trajectory.time,
                                            run.trajectory.states));
    } else {
        throw ValidationError("--format: expected csv or binary");
    }
}

void drive_micro_run(const RunConfig& cfg, double epsilon, const std::string& format) {
    int tiles = 0;
    if (epsilon <= 0.0) {
        tiles = *std::min_element(cfg.inv_eps.begin(), cfg.inv_eps.end());
    } else {
        const double inv = 1.0 / epsilon;
        tiles = static_cast<int>(std::lround(inv));
        if (tiles < 1 || std::abs(inv - tiles) > 1e-9 * std::max(1.0, inv))
            throw ValidationError("--epsilon: must be the reciprocal of a positive integer");
    }
    const UnitCellGeometry cell = build_unit_cell(cfg.inclusions, cfg.n, cfg.dim);
    const MicroRun run = run_micro(cfg, cell, tiles);
    const auto dir = ensure_out_dir(cfg);
    const int side = run.tiles * cfg.n;
    if (format == "csv") {
        write_text_file((dir / "micro_trajectory.csv").string(),
                        trajectory_csv(cfg.dim, side, run.trajectory.time, run.trajectory.states));
    } else if (format == "binary") {
        write_binary_file((dir / "micro_trajectory.bin").string(),
                          trajectory_binary(cfg.dim, side, run.trajectory.time,
                                            run.trajectory.states));
    } else {
        throw ValidationError("--format: expected csv or binary");
    }
    if (cfg.write_json) {
        ordered_json j;
        j["epsilon"] = 1.0 / run.tiles;
        j["sup_H_sq"] = run.energy.sup_h_sq;
        j["int_V_sq"] = run.energy.time_int_v_sq;
        write_text_file((dir / "micro_energy.json").string(), j.dump(2) + "\n");
    }
}

void drive_study(const RunConfig& cfg) {
    const CellReport cell = run_cell_report(cfg);
    const MacroRun macro = run_macro(cfg, cell);
    const StudyReport report =
        sweep_report(cfg, cell, macro, blood_mean_trajectory(cfg, cell, macro));

    const auto dir = ensure_out_dir(cfg);
    if (cfg.write_csv) write_text_file((dir / "study.csv").string(), study_csv(report));
    if (cfg.write_json) write_text_file((dir / "cell_report.json").string(), cell_report_json(cell));
    if (cfg.write_svg) {
        write_text_file((dir / "kernel.svg").string(), render_kernel_plot(report.kernel));
        std::vector<std::pair<double, double>> points;
        for (const StudyRow& row : report.rows) points.emplace_back(row.eps, row.e_tissue);
        write_text_file((dir / "errors.svg").string(), render_error_plot(points));
    }
}

}  // namespace bioheat
