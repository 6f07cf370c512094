#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "bioheat/config.hpp"
#include "bioheat/errors.hpp"
#include "bioheat/harness.hpp"
#include "bioheat/plots.hpp"
#include "bioheat/profiles.hpp"
#include "json.hpp"

using namespace bioheat;

namespace {

RunConfig tiny_config(std::vector<std::string> extra = {}) {
    std::vector<std::string> overrides{"cell.n=8", "time.t_final=0.02", "time.steps=20",
                                       "macro.M=2"};
    overrides.insert(overrides.end(), extra.begin(), extra.end());
    return parse_config("", overrides);
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

int polyline_vertices(const std::string& svg) {
    const std::size_t open = svg.find("points=\"");
    REQUIRE(open != std::string::npos);
    const std::size_t begin = open + 8;
    const std::size_t end = svg.find('"', begin);
    REQUIRE(end != std::string::npos);
    return count_occurrences(svg.substr(begin, end - begin), " ") + 1;
}

}  // namespace

TEST_CASE("empty text yields the documented defaults") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.dim == 2);
    CHECK(cfg.n == 32);
    REQUIRE(cfg.inclusions.size() == 1);
    CHECK(cfg.inclusions[0].center == std::vector<double>{0.5, 0.5});
    CHECK(cfg.inclusions[0].halfwidth == std::vector<double>{0.25, 0.25});
    CHECK(cfg.physics.alpha == 1.0);
    CHECK(cfg.physics.alpha_b == 1.0);
    CHECK(cfg.physics.gamma == 1.0);
    CHECK(cfg.h.kind == "sine-product");
    CHECK(cfg.h_b.kind == "constant");
    CHECK(cfg.h_b.value == 1.0);
    CHECK(cfg.f.kind == "constant");
    CHECK(cfg.t_final == 0.5);
    CHECK(cfg.steps == 500);
    CHECK(cfg.inv_eps == std::vector<int>{4, 8, 16});
    CHECK(cfg.macro_m == 4);
    CHECK(cfg.ic_scaling == IcScaling::natural);
    CHECK(cfg.diffusion_scaling == DiffusionScaling::derived);
    CHECK(cfg.interface_scheme == InterfaceScheme::cell);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("serialize and parse are inverse") {
    auto round = [](const RunConfig& cfg) {
        const std::string once = serialize_config(cfg);
        return serialize_config(parse_config(once)) == once;
    };
    CHECK(round(parse_config("")));

    const RunConfig custom = parse_config(
        "cell.dim = 2\n"
        "cell.n = 16\n"
        "cell.inclusion.center = [0.375, 0.625]\n"
        "cell.inclusion.halfwidth = [0.125, 0.25]\n"
        "physics.alpha = 0.5\n"
        "physics.gamma = 5.0\n"
        "data.h.kind = \"gaussian\"\n"
        "data.h.amplitude = 1.5\n"
        "data.h.center = [0.5, 0.5]\n"
        "data.h.width = 0.2\n"
        "time.t_final = 0.25\n"
        "time.steps = 125\n"
        "study.epsilon_list = [0.5, 0.25]\n"
        "macro.M = 2\n"
        "flags.interface_reconstruction = \"halfcell\"\n"
        "output.formats = [\"csv\"]\n");
    CHECK(round(custom));
    CHECK(custom.interface_scheme == InterfaceScheme::halfcell);
    CHECK(custom.write_csv);
    CHECK_FALSE(custom.write_json);
    CHECK_FALSE(custom.write_svg);

    const RunConfig raw = parse_config(
        "physics.rho = 2.0\n"
        "physics.c = 4.0\n"
        "physics.kappa = 16.0\n"
        "physics.rho_b = 1.0\n"
        "physics.c_b = 8.0\n"
        "physics.kappa_b = 2.0\n"
        "physics.omega_b = 3.0\n");
    CHECK(round(raw));
    CHECK(raw.physics_raw);
    CHECK(raw.physics.alpha == 2.0);
    CHECK(raw.physics.alpha_b == 0.25);
    CHECK(raw.physics.gamma == 6.0);

    const RunConfig plain = parse_config("cell.inclusion.none = true\n");
    CHECK(round(plain));
    CHECK(plain.inclusions.empty());
}

TEST_CASE("overrides land after the file text") {
    const std::vector<std::string> overrides{"physics.alpha=2.5", "cell.n=16",
                                             "flags.ic_scaling=paper"};
    const RunConfig cfg = parse_config("physics.alpha = 1.0\n", overrides);
    CHECK(cfg.physics.alpha == 2.5);
    CHECK(cfg.n == 16);
    // Bare words work as override values; no nested quoting required.
    CHECK(cfg.ic_scaling == IcScaling::paper);
}

TEST_CASE("bad input is rejected with the offending key") {
    CHECK_THROWS_WITH_AS(parse_config("cell.dim = 4\n"), "cell.dim: must be 2 or 3",
                         ValidationError);
    CHECK_THROWS_AS(parse_config("physics.zeta = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("cell.n = \"many\"\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("study.epsilon_list = [0.3]\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("study.epsilon_list = [0.25]\nmacro.M = 3\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("physics.gamma = -1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("time.t_final = 0\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("physics.alpha = 1\nphysics.rho = 2\n"), ValidationError);
    const std::vector<std::string> stray{"cell.m=4"};
    CHECK_THROWS_AS(parse_config("", stray), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/run.toml"), ValidationError);
}

TEST_CASE("profile evaluation") {
    ProfileSpec constant;
    constant.value = 0.7;
    CHECK(evaluate_profile(constant, {0.1, 0.9, 0.0}, 2) == 0.7);

    ProfileSpec sine;
    sine.kind = "sine-product";
    sine.amplitude = 2.0;
    CHECK(evaluate_profile(sine, {0.5, 0.5, 0.0}, 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(evaluate_profile(sine, {0.0, 0.5, 0.0}, 2) == doctest::Approx(0.0).epsilon(1e-14));

    ProfileSpec gauss;
    gauss.kind = "gaussian";
    gauss.amplitude = 1.5;
    gauss.center = {0.3, 0.4};
    gauss.width = 0.2;
    CHECK(evaluate_profile(gauss, {0.3, 0.4, 0.0}, 2) == 1.5);
    CHECK(evaluate_profile(gauss, {0.4, 0.3, 0.0}, 2) ==
          doctest::Approx(1.5 * std::exp(-0.02 / 0.08)).epsilon(1e-14));

    CHECK_THROWS_AS(validate_profile(ProfileSpec{"step", 0.0, 0.0, {}, 0.0}, 2, "data.f"),
                    ValidationError);
    CHECK_THROWS_AS(validate_profile(ProfileSpec{"gaussian", 0.0, 1.0, {0.5}, 0.1}, 2, "data.f"),
                    ValidationError);
    CHECK_THROWS_AS(validate_profile(ProfileSpec{"gaussian", 0.0, 1.0, {0.5, 0.5}, 0.0}, 2,
                                     "data.f"),
                    ValidationError);
}

TEST_CASE("study csv layout") {
    StudyReport report;
    report.rows.push_back({0.25, 0.125, 0.0625, 1.5, 2.25, 1.5, 0.05});
    report.rows.push_back({0.125, 0.1, 0.05, 1.25, 2.0, 0.0, 0.0});
    CHECK(study_csv(report) ==
          "epsilon,e_tissue,e_blood,energy_H,energy_V,t_micro_sec,t_macro_sec\n"
          "0.25,0.125,0.0625,1.5,2.25,1.500,0.050\n"
          "0.125,0.1,0.05,1.25,2,0.000,0.000\n");
}

TEST_CASE("trajectory csv layout") {
    const std::vector<std::vector<double>> states{{0.0, 0.25, 0.5, 1.0}, {-1.0, 0.75, 2.0, 4.0}};
    CHECK(trajectory_csv(2, 2, TimeGrid{0.5, 1}, states) ==
          "t,ix,iy,value\n"
          "0,0,0,0\n"
          "0,1,0,0.25\n"
          "0,0,1,0.5\n"
          "0,1,1,1\n"
          "0.5,0,0,-1\n"
          "0.5,1,0,0.75\n"
          "0.5,0,1,2\n"
          "0.5,1,1,4\n");
}

TEST_CASE("trajectory binary round trip") {
    const std::vector<std::vector<double>> states{{0.0, 0.25, 0.5, 1.0}, {-1.0, 0.75, 2.0, 4.0}};
    const TimeGrid time{0.5, 1};
    const std::vector<std::uint8_t> bytes = trajectory_binary(2, 2, time, states);
    REQUIRE(bytes.size() == 8 + 3 * 4 + 8 + 2 * 4 * 8);

    CHECK(std::memcmp(bytes.data(), "BHTRJ01\n", 8) == 0);
    std::int32_t header[3];
    std::memcpy(header, bytes.data() + 8, sizeof header);
    CHECK(header[0] == 2);
    CHECK(header[1] == 2);
    CHECK(header[2] == 1);
    double dt = 0.0;
    std::memcpy(&dt, bytes.data() + 20, sizeof dt);
    CHECK(dt == 0.5);
    for (std::size_t k = 0; k < states.size(); ++k)
        for (std::size_t c = 0; c < states[k].size(); ++c) {
            double v = 0.0;
            std::memcpy(&v, bytes.data() + 28 + 8 * (4 * k + c), sizeof v);
            CHECK(v == states[k][c]);
        }
}

TEST_CASE("cell report json parses back") {
    const RunConfig cfg = tiny_config();
    const CellReport rep = run_cell_report(cfg);
    const nlohmann::json j = nlohmann::json::parse(cell_report_json(rep));

    REQUIRE(j["A_eff"].size() == 4);
    CHECK(j["gamma_eff"].get<double>() == 8.0 / 3.0);
    CHECK(j["vol_Y1"].get<double>() == 0.75);
    CHECK(j["dt"].get<double>() == rep.transients.time.dt);
    REQUIRE(j["H"].size() == 21);
    REQUIRE(j["q"].size() == 21);
    for (std::size_t k = 0; k < 21; ++k)
        CHECK(j["H"][k].get<double>() == rep.transients.kernel.values[k]);
    const nlohmann::json& diag = j["diagnostics"];
    CHECK(diag["partition_defect"].get<double>() < 1e-9);
    CHECK(diag["symmetry_residual"].get<double>() < 1e-9);
    CHECK(diag["eig_min"].get<double>() > 0.0);
    CHECK(diag["kernel_integral"].get<double>() > 0.0);
    CHECK(diag.contains("kernel_integral_rel_gap"));
    CHECK(diag.contains("monotonicity_defect"));
    CHECK(diag.contains("range_defect"));
    CHECK(diag.contains("saturation_final_gap"));
}

TEST_CASE("initial-condition flag scales the start field") {
    const RunConfig natural_cfg = tiny_config();
    const CellReport rep = run_cell_report(natural_cfg);
    const MacroRun plain = run_macro(natural_cfg, rep);

    const RunConfig paper_cfg = tiny_config({"flags.ic_scaling=paper"});
    const MacroRun scaled = run_macro(paper_cfg, rep);
    REQUIRE(plain.trajectory.states[0].size() == scaled.trajectory.states[0].size());
    for (std::size_t c = 0; c < plain.trajectory.states[0].size(); ++c)
        CHECK(scaled.trajectory.states[0][c] == 0.75 * plain.trajectory.states[0][c]);
}

TEST_CASE("diffusion flags coincide without an inclusion") {
    std::vector<std::string> overrides{"cell.n=8", "time.t_final=0.02", "time.steps=20",
                                       "macro.M=2"};
    const RunConfig base = parse_config("cell.inclusion.none = true\n", overrides);
    const CellReport rep = run_cell_report(base);
    CHECK(rep.eff.vol_tissue == 1.0);
    const MacroRun derived = run_macro(base, rep);

    overrides.push_back("flags.diffusion_scaling=paper");
    const RunConfig printed = parse_config("cell.inclusion.none = true\n", overrides);
    const MacroRun paper = run_macro(printed, rep);
    for (std::size_t k = 0; k < derived.trajectory.states.size(); ++k)
        for (std::size_t c = 0; c < derived.trajectory.states[k].size(); ++c)
            CHECK(derived.trajectory.states[k][c] == paper.trajectory.states[k][c]);
}

TEST_CASE("blood reconstruction starts from its own data") {
    const RunConfig cfg = tiny_config();
    const CellReport rep = run_cell_report(cfg);
    const MacroRun macro = run_macro(cfg, rep);
    const std::vector<std::vector<double>> blood = blood_mean_trajectory(cfg, rep, macro);
    REQUIRE(blood.size() == macro.trajectory.states.size());
    for (double v : blood[0]) CHECK(v == 1.0);
}

TEST_CASE("zero data produces a zero study") {
    const RunConfig cfg = parse_config(
        "cell.n = 4\n"
        "data.h.kind = \"constant\"\n"
        "data.h_b.value = 0.0\n"
        "time.t_final = 0.003\n"
        "time.steps = 3\n"
        "study.epsilon_list = [0.5]\n"
        "macro.M = 2\n");
    const StudyReport report = run_convergence_study(cfg);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].eps == 0.5);
    CHECK(report.rows[0].e_tissue == 0.0);
    CHECK(report.rows[0].e_blood == 0.0);
    CHECK(report.rows[0].energy_h == 0.0);
    CHECK(report.rows[0].energy_v == 0.0);
    CHECK(report.kernel.values.size() == 4);
}

TEST_CASE("kernel plot carries one vertex per sample") {
    KernelSamples kernel{0.1, {3.0, 2.0, 1.5, 1.25, 1.0}};
    const std::string svg = render_kernel_plot(kernel);
    CHECK(count_occurrences(svg, "<polyline") == 1);
    CHECK(polyline_vertices(svg) == 5);
    CHECK(svg.find("</svg>") != std::string::npos);

    const std::string flat = render_kernel_plot(KernelSamples{});
    CHECK(count_occurrences(flat, "<polyline") == 1);
    CHECK(polyline_vertices(flat) == 2);
}

TEST_CASE("error plot marks every point") {
    const std::string svg =
        render_error_plot({{0.25, 0.1}, {0.125, 0.06}, {0.0625, 0.0}});
    CHECK(count_occurrences(svg, "<circle") == 3);
    CHECK(count_occurrences(svg, "<polyline") == 1);

    const std::string single = render_error_plot({{0.25, 0.1}});
    CHECK(count_occurrences(single, "<circle") == 1);
    CHECK(count_occurrences(single, "<polyline") == 0);

    CHECK_THROWS_AS(render_error_plot({}), ValidationError);
    CHECK_THROWS_AS(render_error_plot({{-0.25, 0.1}}), ValidationError);
}
