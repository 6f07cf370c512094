#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bioheat/numerics.hpp"

namespace bioheat {

// Deterministic standalone SVG: fixed viewport, fixed decimals, no metadata.
// One polyline vertex per kernel sample.
std::string render_kernel_plot(const KernelSamples& kernel);

// Log-log error-versus-eps plot with one circle marker per point; values
// below 1e-16 are clamped so zero errors stay plottable.
std::string render_error_plot(const std::vector<std::pair<double, double>>& points);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace bioheat
