#pragma once

#include <array>
#include <vector>

#include "bioheat/geometry.hpp"

namespace bioheat {

struct PhysicalParams {
    double alpha = 1.0;    // tissue diffusivity
    double alpha_b = 1.0;  // blood diffusivity (before the eps^2 scaling)
    double gamma = 1.0;    // interface exchange coefficient
};

// Which conductivity feeds the blood diffusivity; the printed source is
// ambiguous here, so both readings are supported and kappa_b is the default.
enum class AlphaBloodSource { kappa_b, kappa };

struct RawPhysiology {
    double rho = 1.0, c = 1.0, kappa = 1.0;        // tissue density, heat capacity, conductivity
    double rho_b = 1.0, c_b = 1.0, kappa_b = 1.0;  // blood counterparts
    double omega_b = 1.0;                          // perfusion rate
};

// alpha = kappa/(rho c), alpha_b = kappa_b/(rho_b c_b) by default,
// gamma = omega_b rho_b c_b / c.
PhysicalParams derive_coefficients(const RawPhysiology& raw,
                                   AlphaBloodSource source = AlphaBloodSource::kappa_b);

// Periodic corrector for one coordinate direction, stored on the full cell
// grid with zeros on blood cells; gauge: zero mean over the tissue phase.
struct CorrectorField {
    int axis = 0;
    std::vector<double> values;
};

CorrectorField solve_corrector(const UnitCellGeometry& cell, double alpha, int axis);

// Face-based energy product of the corrected gradients; symmetric by
// construction and positive definite for a connected tissue phase.
std::array<double, 9> effective_tensor(const UnitCellGeometry& cell, double alpha,
                                       const std::vector<CorrectorField>& correctors);

// gamma * |interface| / |tissue phase|.
double effective_gamma(const UnitCellGeometry& cell, double gamma);

struct EffectiveCoefficients {
    int dim = 0;
    std::array<double, 9> tensor{};  // row-major dim x dim
    double gamma_eff = 0.0;
    double vol_tissue = 0.0;
    std::vector<CorrectorField> correctors;
};

EffectiveCoefficients compute_effective_coefficients(const UnitCellGeometry& cell,
                                                     const PhysicalParams& params);

// Eigenvalues of a symmetric dim x dim matrix in ascending order
// (closed form for dim 2, cyclic Jacobi sweeps for dim 3).
std::vector<double> sym_eigenvalues(const std::array<double, 9>& m, int dim);

}  // namespace bioheat
