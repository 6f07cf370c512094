#include "bioheat/cell_static.hpp"

#include <algorithm>
#include <cmath>

#include "bioheat/errors.hpp"
#include "bioheat/numerics.hpp"

namespace bioheat {

PhysicalParams derive_coefficients(const RawPhysiology& raw, AlphaBloodSource source) {
    if (!(raw.rho > 0.0 && raw.c > 0.0 && raw.kappa > 0.0))
        throw ValidationError("physics: tissue rho, c, kappa must be positive");
    if (!(raw.rho_b > 0.0 && raw.c_b > 0.0 && raw.kappa_b > 0.0))
        throw ValidationError("physics: blood rho_b, c_b, kappa_b must be positive");
    if (raw.omega_b < 0.0) throw ValidationError("physics: omega_b must be non-negative");
    PhysicalParams p;
    p.alpha = raw.kappa / (raw.rho * raw.c);
    const double blood_kappa = source == AlphaBloodSource::kappa_b ? raw.kappa_b : raw.kappa;
    p.alpha_b = blood_kappa / (raw.rho_b * raw.c_b);
    p.gamma = raw.omega_b * raw.rho_b * raw.c_b / raw.c;
    return p;
}

namespace {

// Compact numbering of the tissue cells; -1 elsewhere.
std::vector<int> tissue_index(const UnitCellGeometry& cell) {
    std::vector<int> map(static_cast<std::size_t>(cell.cell_count()), -1);
    int next = 0;
    for (int c = 0; c < cell.cell_count(); ++c)
        if (cell.phase(c) == kTissuePhase) map[static_cast<std::size_t>(c)] = next++;
    return map;
}

}  // namespace

CorrectorField solve_corrector(const UnitCellGeometry& cell, double alpha, int axis) {
    if (!(alpha > 0.0)) throw ValidationError("physics.alpha: must be positive");
    if (axis < 0 || axis >= cell.dim()) throw ValidationError("corrector: axis out of range");

    const std::vector<int> index = tissue_index(cell);
    const int unknowns = static_cast<int>(std::count_if(index.begin(), index.end(),
                                                        [](int i) { return i >= 0; }));

    // Conduction faces are the tissue-tissue faces under periodic wrap;
    // interface faces carry no flux in the corrector problem.
    const double h = cell.spacing();
    const double conduct = alpha * std::pow(h, cell.dim() - 2);
    std::vector<Triplet> entries;
    std::vector<double> rhs(static_cast<std::size_t>(unknowns), 0.0);
    for (int c = 0; c < cell.cell_count(); ++c) {
        const int row = index[static_cast<std::size_t>(c)];
        if (row < 0) continue;
        for (int a = 0; a < cell.dim(); ++a) {
            const int nb = cell.periodic_neighbor(c, a, +1);
            const int col = index[static_cast<std::size_t>(nb)];
            if (col < 0) continue;
            entries.push_back({row, row, conduct});
            entries.push_back({col, col, conduct});
            entries.push_back({row, col, -conduct});
            entries.push_back({col, row, -conduct});
            if (a == axis) {
                // Load from the unit macroscopic gradient: the affine field
                // jumps by h across every face normal to the chosen axis.
                rhs[static_cast<std::size_t>(col)] -= conduct * h;
                rhs[static_cast<std::size_t>(row)] += conduct * h;
            }
        }
    }

    const SparseOperator op = SparseOperator::from_triplets(unknowns, std::move(entries));
    CgOptions opt;
    opt.project_constants = true;
    const std::vector<double> compact = cg_solve(op, rhs, opt);

    CorrectorField corr;
    corr.axis = axis;
    corr.values.assign(static_cast<std::size_t>(cell.cell_count()), 0.0);
    for (int c = 0; c < cell.cell_count(); ++c) {
        const int row = index[static_cast<std::size_t>(c)];
        if (row >= 0) corr.values[static_cast<std::size_t>(c)] = compact[static_cast<std::size_t>(row)];
    }
    return corr;
}

std::array<double, 9> effective_tensor(const UnitCellGeometry& cell, double alpha,
                                       const std::vector<CorrectorField>& correctors) {
    const int dim = cell.dim();
    if (static_cast<int>(correctors.size()) != dim)
        throw ValidationError("effective_tensor: one corrector per direction required");
    for (int i = 0; i < dim; ++i)
        if (correctors[static_cast<std::size_t>(i)].axis != i)
            throw ValidationError("effective_tensor: correctors out of order");

    // Quadrature over conduction faces: each face carries the directional
    // derivative (corrector jump / h + Kronecker delta) with volume weight h^d.
    const double h = cell.spacing();
    const double weight = alpha * cell.cell_volume();
    std::array<double, 9> tensor{};
    for (int c = 0; c < cell.cell_count(); ++c) {
        if (cell.phase(c) != kTissuePhase) continue;
        for (int a = 0; a < dim; ++a) {
            const int nb = cell.periodic_neighbor(c, a, +1);
            if (cell.phase(nb) != kTissuePhase) continue;
            std::array<double, 3> grad{0.0, 0.0, 0.0};
            for (int i = 0; i < dim; ++i) {
                const std::vector<double>& w = correctors[static_cast<std::size_t>(i)].values;
                grad[i] = (w[static_cast<std::size_t>(nb)] - w[static_cast<std::size_t>(c)]) / h +
                          (i == a ? 1.0 : 0.0);
            }
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    tensor[static_cast<std::size_t>(3 * i + j)] += weight * grad[i] * grad[j];
        }
    }
    return tensor;
}

double effective_gamma(const UnitCellGeometry& cell, double gamma) {
    if (gamma < 0.0) throw ValidationError("physics.gamma: must be non-negative");
    if (!(cell.vol_tissue() > 0.0))
        throw ValidationError("effective_gamma: empty tissue phase");
    return gamma * cell.interface_area() / cell.vol_tissue();
}

EffectiveCoefficients compute_effective_coefficients(const UnitCellGeometry& cell,
                                                     const PhysicalParams& params) {
    EffectiveCoefficients eff;
    eff.dim = cell.dim();
    for (int a = 0; a < cell.dim(); ++a)
        eff.correctors.push_back(solve_corrector(cell, params.alpha, a));
    eff.tensor = effective_tensor(cell, params.alpha, eff.correctors);
    eff.gamma_eff = effective_gamma(cell, params.gamma);
    eff.vol_tissue = cell.vol_tissue();
    return eff;
}

std::vector<double> sym_eigenvalues(const std::array<double, 9>& m, int dim) {
    if (dim == 2) {
        const double a = m[0], b = 0.5 * (m[1] + m[3]), d = m[4];
        const double tr = a + d;
        const double disc = std::sqrt(std::max(0.0, 0.25 * (a - d) * (a - d) + b * b));
        return {0.5 * tr - disc, 0.5 * tr + disc};
    }
    if (dim != 3) throw ValidationError("sym_eigenvalues: dimension must be 2 or 3");

    std::array<double, 9> a = m;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double s = 0.5 * (a[static_cast<std::size_t>(3 * i + j)] +
                                    a[static_cast<std::size_t>(3 * j + i)]);
            a[static_cast<std::size_t>(3 * i + j)] = s;
            a[static_cast<std::size_t>(3 * j + i)] = s;
        }
    // Cyclic Jacobi sweeps; three indices, so convergence is quick.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) off += a[static_cast<std::size_t>(3 * p + q)] *
                                                   a[static_cast<std::size_t>(3 * p + q)];
        if (off < 1e-30) break;
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a[static_cast<std::size_t>(3 * p + q)];
                if (apq == 0.0) continue;
                const double app = a[static_cast<std::size_t>(3 * p + p)];
                const double aqq = a[static_cast<std::size_t>(3 * q + q)];
                const double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[static_cast<std::size_t>(3 * k + p)];
                    const double akq = a[static_cast<std::size_t>(3 * k + q)];
                    a[static_cast<std::size_t>(3 * k + p)] = c * akp - s * akq;
                    a[static_cast<std::size_t>(3 * k + q)] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[static_cast<std::size_t>(3 * p + k)];
                    const double aqk = a[static_cast<std::size_t>(3 * q + k)];
                    a[static_cast<std::size_t>(3 * p + k)] = c * apk - s * aqk;
                    a[static_cast<std::size_t>(3 * q + k)] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig{a[0], a[4], a[8]};
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace bioheat
