#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "bioheat/cell_static.hpp"
#include "bioheat/cell_transient.hpp"
#include "bioheat/errors.hpp"
#include "bioheat/geometry.hpp"
#include "bioheat/macro_solver.hpp"
#include "support/oracles.hpp"

using namespace bioheat;

namespace {

constexpr std::array<double, 9> kIdentity{1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
constexpr std::array<double, 9> kFull{2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 0.0};

std::vector<double> sine_field(const MacroGrid& grid, double amplitude) {
    std::vector<double> out(static_cast<std::size_t>(grid.cell_count()));
    for (int c = 0; c < grid.cell_count(); ++c) {
        const std::array<double, 3> x = grid.cell_center(c);
        double v = amplitude;
        for (int a = 0; a < grid.dim; ++a) v *= std::sin(M_PI * x[static_cast<std::size_t>(a)]);
        out[static_cast<std::size_t>(c)] = v;
    }
    return out;
}

std::vector<std::vector<double>> zero_source(int fields, std::size_t size) {
    return std::vector<std::vector<double>>(static_cast<std::size_t>(fields),
                                            std::vector<double>(size, 0.0));
}

UnitCellGeometry default_cell(int n) {
    InclusionSpec spec;
    spec.center = {0.5, 0.5};
    spec.halfwidth = {0.25, 0.25};
    return build_unit_cell({&spec, 1}, n, 2);
}

}  // namespace

TEST_CASE("grid construction guards") {
    CHECK_THROWS_AS(make_macro_grid(0, 2), ValidationError);
    CHECK_THROWS_AS(make_macro_grid(8, 4), ValidationError);
    const MacroGrid g = make_macro_grid(3, 2);
    CHECK(g.cell_count() == 9);
    CHECK(g.spacing() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("operator stays symmetric with cross terms at the wall") {
    const MacroGrid g = make_macro_grid(5, 2);
    const SparseOperator a = assemble_macro_operator(g, kFull, 0.3);
    CHECK(a.matches_transpose(1e-14));
}

TEST_CASE("one implicit step against a dense solve") {
    const MacroGrid g = make_macro_grid(3, 2);
    const std::size_t n = static_cast<std::size_t>(g.cell_count());
    const TimeGrid time{0.02, 1};

    MacroProblem p;
    p.grid = g;
    p.diffusion = kFull;
    p.gamma_eff = 0.3;
    p.time = time;
    p.initial.resize(n);
    p.source = zero_source(2, n);
    for (std::size_t i = 0; i < n; ++i) {
        p.initial[i] = 0.2 + 0.05 * static_cast<double>(i);
        p.source[1][i] = 0.4 - 0.03 * static_cast<double>(i);
    }
    const MacroTrajectory traj = solve_macro(p);

    oracle::Dense dense = oracle::dense_from(assemble_macro_operator(g, kFull, 0.3));
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        dense[i][i] += 1.0 / time.dt;
        rhs[i] = p.initial[i] / time.dt + p.source[1][i];
    }
    const std::vector<double> expect = oracle::dense_solve(dense, rhs);
    CHECK(oracle::max_abs_diff(traj.states[1], expect) < 1e-10);
}

TEST_CASE("sampled sine product is an exact transient mode") {
    const int m = 4;
    const double h = 1.0 / m;
    const TimeGrid time{0.01, 10};

    MacroProblem p;
    p.grid = make_macro_grid(m, 2);
    p.diffusion = kIdentity;
    p.gamma_eff = 0.0;
    p.time = time;
    p.initial = sine_field(p.grid, 1.0);
    p.source = zero_source(time.steps + 1, p.initial.size());
    const MacroTrajectory traj = solve_macro(p);

    const double per_axis = 4.0 / (h * h) * std::pow(std::sin(0.5 * M_PI * h), 2);
    const double factor = 1.0 / (1.0 + time.dt * 2.0 * per_axis);
    double scale = 1.0;
    for (int k = 0; k <= time.steps; ++k) {
        for (std::size_t i = 0; i < p.initial.size(); ++i)
            CHECK(traj.states[static_cast<std::size_t>(k)][i] ==
                  doctest::Approx(scale * p.initial[i]).epsilon(1e-8));
        scale *= factor;
    }
}

TEST_CASE("all-zero kernel equals no kernel") {
    MacroProblem p;
    p.grid = make_macro_grid(4, 2);
    p.diffusion = kIdentity;
    p.gamma_eff = 0.5;
    p.time = TimeGrid{0.01, 8};
    p.initial = sine_field(p.grid, 0.7);
    p.source = zero_source(9, p.initial.size());
    const MacroTrajectory bare = solve_macro(p);
    p.kernel = KernelSamples{0.01, std::vector<double>(9, 0.0)};
    const MacroTrajectory zeroed = solve_macro(p);
    for (std::size_t k = 0; k < bare.states.size(); ++k)
        for (std::size_t i = 0; i < bare.states[k].size(); ++i)
            CHECK(bare.states[k][i] == zeroed.states[k][i]);
}

TEST_CASE("memory term follows the lagged trapezoid rule") {
    // Single cell: two wall faces per axis contribute 2/h^2 each, so the
    // spatial row is 8 + gamma_eff and everything is scalar.
    const double dt = 0.1, gamma_eff = 0.4, f = 0.1, u0 = 0.8;
    MacroProblem p;
    p.grid = make_macro_grid(1, 2);
    p.diffusion = kIdentity;
    p.gamma_eff = gamma_eff;
    p.time = TimeGrid{dt, 2};
    p.kernel = KernelSamples{dt, {2.0, 1.0, 0.5}};
    p.initial = {u0};
    p.source = {{0.0}, {f}, {f}};
    const MacroTrajectory traj = solve_macro(p);

    const double a = 1.0 / dt + 8.0 + gamma_eff;
    const double u1 = (u0 / dt + f) / a;
    const double conv1 = dt * (0.5 * p.kernel.values[1] * u0 + 0.5 * p.kernel.values[0] * u1);
    const double u2 = (u1 / dt + f + conv1) / a;
    CHECK(traj.states[1][0] == doctest::Approx(u1).epsilon(1e-10));
    CHECK(traj.states[2][0] == doctest::Approx(u2).epsilon(1e-10));
}

TEST_CASE("norm decays without forcing") {
    MacroProblem p;
    p.grid = make_macro_grid(8, 2);
    p.diffusion = kIdentity;
    p.gamma_eff = 0.5;
    p.time = TimeGrid{0.02, 20};
    p.initial = sine_field(p.grid, 1.0);
    p.source = zero_source(21, p.initial.size());
    const MacroTrajectory traj = solve_macro(p);
    auto norm = [](const std::vector<double>& u) {
        double s = 0.0;
        for (double v : u) s += v * v;
        return std::sqrt(s);
    };
    for (std::size_t k = 1; k < traj.states.size(); ++k)
        CHECK(norm(traj.states[k]) < norm(traj.states[k - 1]));
}

TEST_CASE("problem validation") {
    MacroProblem p;
    p.grid = make_macro_grid(2, 2);
    p.diffusion = kIdentity;
    p.time = TimeGrid{0.01, 3};
    p.initial.assign(4, 0.0);
    p.source = zero_source(4, 4);

    MacroProblem bad_initial = p;
    bad_initial.initial.resize(3);
    CHECK_THROWS_AS(solve_macro(bad_initial), ValidationError);

    MacroProblem bad_source = p;
    bad_source.source.pop_back();
    CHECK_THROWS_AS(solve_macro(bad_source), ValidationError);

    MacroProblem short_kernel = p;
    short_kernel.kernel = KernelSamples{0.01, {1.0, 1.0}};
    CHECK_THROWS_AS(solve_macro(short_kernel), ValidationError);

    MacroProblem wrong_step = p;
    wrong_step.kernel = KernelSamples{0.02, {1.0, 1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(solve_macro(wrong_step), ValidationError);
}

TEST_CASE("exchange source assembly") {
    const std::vector<double> f{0.3, 0.3}, h_b{0.2, 0.4}, f_b{0.1, 0.0};
    const std::vector<double> decay_flux{2.0, 1.0}, accumulation_flux{0.0, 0.5};
    const double vol_tissue = 0.75;
    const std::vector<std::vector<double>> s =
        assemble_macro_source(f, h_b, f_b, decay_flux, accumulation_flux, vol_tissue);
    REQUIRE(s.size() == 2);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(s[k][i] == doctest::Approx(f[i] + (decay_flux[k] * h_b[i] +
                                                     accumulation_flux[k] * f_b[i]) /
                                                        vol_tissue)
                                 .epsilon(1e-15));

    // Closed interface: the flux series vanish and the source is f alone.
    const std::vector<double> none{0.0, 0.0};
    const std::vector<std::vector<double>> plain =
        assemble_macro_source(f, h_b, f_b, none, none, vol_tissue);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 2; ++i) CHECK(plain[k][i] == f[i]);
}

TEST_CASE("pointwise reconstruction averages to the mean reconstruction") {
    const UnitCellGeometry cell = default_cell(8);
    const TimeGrid time{0.05, 4};
    const CellTransientSeries tr =
        solve_cell_transients(cell, PhysicalParams{0.5, 20.0, 5.0}, time, true);

    MacroTrajectory macro;
    macro.time = time;
    const std::size_t cells = 4;
    for (int k = 0; k <= time.steps; ++k) {
        std::vector<double> state(cells);
        for (std::size_t c = 0; c < cells; ++c)
            state[c] = 0.3 + 0.1 * k + 0.05 * static_cast<double>(c) * (k - 1);
        macro.states.push_back(state);
    }
    const std::vector<double> h_b(cells, 0.2), f_b(cells, 0.1);
    const std::vector<std::vector<double>> mean = reconstruct_blood_mean(
        macro, h_b, f_b, tr.decay_mean, tr.saturation_mean, tr.accumulation_mean);

    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<double> history(macro.states.size());
        for (std::size_t k = 0; k < history.size(); ++k) history[k] = macro.states[k][c];
        const std::vector<std::vector<double>> point = reconstruct_blood_point(
            history, time.dt, h_b[c], f_b[c], tr.decay, tr.saturation, tr.accumulation);
        REQUIRE(point.size() == mean.size());
        for (std::size_t k = 0; k < point.size(); ++k) {
            double avg = 0.0;
            for (double v : point[k]) avg += v;
            avg /= static_cast<double>(point[k].size());
            CHECK(std::abs(avg - mean[k][c]) < 1e-12);
        }
    }
}

TEST_CASE("coarse run tracks its own refinement") {
    const UnitCellGeometry cell = default_cell(8);
    const PhysicalParams params{0.5, 20.0, 5.0};
    const TimeGrid time{1e-3, 200};
    const CellTransientSeries tr = solve_cell_transients(cell, params, time);
    const EffectiveCoefficients co = compute_effective_coefficients(cell, params);

    auto run = [&](int m) {
        MacroProblem p;
        p.grid = make_macro_grid(m, 2);
        p.diffusion = co.tensor;
        p.gamma_eff = co.gamma_eff;
        p.kernel = tr.kernel;
        p.time = time;
        p.initial = sine_field(p.grid, 0.7);
        p.source = zero_source(time.steps + 1, p.initial.size());
        return solve_macro(p);
    };
    const MacroTrajectory coarse = run(4);
    const MacroTrajectory fine = run(64);

    double num = 0.0, den = 0.0;
    const double vol = 1.0 / 16.0;
    for (int k = 0; k <= time.steps; ++k) {
        const double w = (k == 0 || k == time.steps) ? 0.5 : 1.0;
        const std::vector<double> r =
            block_restrict(fine.states[static_cast<std::size_t>(k)], 2, 64, 4);
        for (std::size_t c = 0; c < r.size(); ++c) {
            const double d = r[c] - coarse.states[static_cast<std::size_t>(k)][c];
            num += w * d * d * vol * time.dt;
            den += w * r[c] * r[c] * vol * time.dt;
        }
    }
    const double gap = std::sqrt(num / den);
    CHECK(gap > 0.9 * 0.070257610712344);
    CHECK(gap < 1.1 * 0.070257610712344);

    double final_norm = 0.0;
    for (double v : coarse.states.back()) final_norm += v * v * vol;
    CHECK(std::sqrt(final_norm) == doctest::Approx(0.123040125669126).epsilon(1e-8));
}
