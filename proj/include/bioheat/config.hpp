#pragma once

#include <span>
#include <string>
#include <vector>

#include "bioheat/cell_static.hpp"
#include "bioheat/cell_transient.hpp"
#include "bioheat/geometry.hpp"
#include "bioheat/micro_solver.hpp"
#include "bioheat/profiles.hpp"

namespace bioheat {

// Initial condition of the limit problem: `natural` starts from h itself,
// `paper` from the tissue-fraction-weighted field.
enum class IcScaling { natural, paper };

// Limit diffusion tensor: `derived` divides by the tissue volume fraction,
// `paper` uses the tensor as printed.
enum class DiffusionScaling { derived, paper };

struct RunConfig {
    int dim = 2;
    int n = 32;
    std::vector<InclusionSpec> inclusions;  // at most one from a config file

    PhysicalParams physics{1.0, 1.0, 1.0};
    bool physics_raw = false;  // physics derived from the physiological set below
    RawPhysiology raw;
    AlphaBloodSource alpha_b_uses = AlphaBloodSource::kappa_b;

    ProfileSpec f, f_b, h, h_b;

    double t_final = 0.5;
    int steps = 500;

    std::vector<int> inv_eps{4, 8, 16};  // study resolutions, eps = 1/K
    int macro_m = 4;

    IcScaling ic_scaling = IcScaling::natural;
    DiffusionScaling diffusion_scaling = DiffusionScaling::derived;
    InterfaceScheme interface_scheme = InterfaceScheme::cell;

    std::string out_dir = "out";
    bool write_csv = true, write_json = true, write_svg = true;

    TimeGrid time_grid() const { return TimeGrid{t_final / steps, steps}; }
    PhysicalParams resolved_physics() const {
        return physics_raw ? derive_coefficients(raw, alpha_b_uses) : physics;
    }
};

// Flat typed key-value text (TOML-like scalars, dotted keys, '#' comments).
// Overrides are "key=value" strings applied after the file content; unknown
// keys and type mismatches are rejected with the offending key in the message.
RunConfig parse_config(const std::string& text, std::span<const std::string> overrides = {});
RunConfig load_config(const std::string& path, std::span<const std::string> overrides = {});

// Canonical listing of every setting; parse(serialize(c)) reproduces c.
std::string serialize_config(const RunConfig& cfg);

}  // namespace bioheat
