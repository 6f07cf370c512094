#include "bioheat/profiles.hpp"

#include <cmath>
#include <numbers>

#include "bioheat/errors.hpp"

namespace bioheat {

void validate_profile(const ProfileSpec& spec, int dim, const std::string& key) {
    if (spec.kind == "constant" || spec.kind == "sine-product") return;
    if (spec.kind == "gaussian") {
        if (static_cast<int>(spec.center.size()) != dim)
            throw ValidationError(key + ".center: needs one entry per dimension");
        if (!(spec.width > 0.0)) throw ValidationError(key + ".width: must be positive");
        return;
    }
    throw ValidationError(key + ".kind: unknown profile '" + spec.kind + "'");
}

double evaluate_profile(const ProfileSpec& spec, const std::array<double, 3>& x, int dim) {
    if (spec.kind == "constant") return spec.value;
    if (spec.kind == "gaussian") {
        double r_sq = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double d = x[static_cast<std::size_t>(a)] - spec.center[static_cast<std::size_t>(a)];
            r_sq += d * d;
        }
        return spec.amplitude * std::exp(-r_sq / (2.0 * spec.width * spec.width));
    }
    if (spec.kind == "sine-product") {
        double p = spec.amplitude;
        for (int a = 0; a < dim; ++a)
            p *= std::sin(std::numbers::pi * x[static_cast<std::size_t>(a)]);
        return p;
    }
    throw ValidationError("profile: unknown kind '" + spec.kind + "'");
}

}  // namespace bioheat
