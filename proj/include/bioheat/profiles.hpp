#pragma once

#include <array>
#include <string>
#include <vector>

namespace bioheat {

// Named analytic data profiles; no expression parsing.
//   constant:     value
//   gaussian:     amplitude * exp(-|x - center|^2 / (2 width^2))
//   sine-product: amplitude * prod_a sin(pi x_a)
struct ProfileSpec {
    std::string kind = "constant";
    double value = 0.0;
    double amplitude = 0.0;
    std::vector<double> center;
    double width = 0.0;
};

void validate_profile(const ProfileSpec& spec, int dim, const std::string& key);
double evaluate_profile(const ProfileSpec& spec, const std::array<double, 3>& x, int dim);

}  // namespace bioheat
