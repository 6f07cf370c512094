#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace bioheat {

inline constexpr std::uint8_t kTissuePhase = 1;
inline constexpr std::uint8_t kBloodPhase = 2;

// Axis-aligned box strictly inside the unit cell; faces must land on grid
// planes of the chosen resolution.
struct InclusionSpec {
    std::vector<double> center;
    std::vector<double> halfwidth;
};

// One grid face separating a tissue cell from a blood cell.
struct InterfaceFace {
    int tissue_cell = 0;
    int blood_cell = 0;
    int axis = 0;
    int sign = 0;  // +1 when the blood cell is the +axis neighbor of the tissue cell
};

// Voxelized periodicity cell Y = (0,1)^d on an n^d grid with a two-phase mask.
class UnitCellGeometry {
public:
    int dim() const { return dim_; }
    int resolution() const { return n_; }
    int cell_count() const { return total_; }
    double spacing() const { return spacing_; }
    double cell_volume() const { return cell_volume_; }
    double face_area() const { return face_area_; }

    double vol_tissue() const { return vol_tissue_; }
    double vol_blood() const { return vol_blood_; }
    double interface_area() const { return interface_area_; }

    std::uint8_t phase(int cell) const { return phase_[static_cast<std::size_t>(cell)]; }
    const std::vector<std::uint8_t>& phases() const { return phase_; }
    const std::vector<InterfaceFace>& interface_faces() const { return interface_faces_; }

    std::array<int, 3> coords(int cell) const;
    int linear_index(const std::array<int, 3>& c) const;
    // Neighboring cell across the face in direction dir (+1/-1) along axis,
    // with periodic wrap.
    int periodic_neighbor(int cell, int axis, int dir) const;
    std::array<double, 3> cell_center(int cell) const;

    friend UnitCellGeometry build_unit_cell(std::span<const InclusionSpec> inclusions, int n,
                                            int dim);

private:
    int dim_ = 0, n_ = 0, total_ = 0;
    double spacing_ = 0.0, cell_volume_ = 0.0, face_area_ = 0.0;
    double vol_tissue_ = 0.0, vol_blood_ = 0.0, interface_area_ = 0.0;
    std::vector<std::uint8_t> phase_;
    std::vector<InterfaceFace> interface_faces_;
};

// Validates the inclusions (alignment, strict interiority, disjointness),
// rasterizes the mask, enumerates interface faces, and checks that the tissue
// phase stays face-connected under periodic identification.
UnitCellGeometry build_unit_cell(std::span<const InclusionSpec> inclusions, int n, int dim);

// The unit cell tiled K times per axis onto Omega = (0,1)^d with eps = 1/K.
class MicroGrid {
public:
    int dim() const { return dim_; }
    int tiles_per_side() const { return tiles_; }
    int cell_resolution() const { return n_; }
    int cells_per_side() const { return side_; }
    int cell_count() const { return total_; }
    double eps() const { return eps_; }
    double spacing() const { return spacing_; }
    double cell_volume() const { return cell_volume_; }
    double face_area() const { return face_area_; }

    std::uint8_t phase(int cell) const { return phase_[static_cast<std::size_t>(cell)]; }
    const std::vector<std::uint8_t>& phases() const { return phase_; }

    std::array<int, 3> coords(int cell) const;
    int linear_index(const std::array<int, 3>& c) const;
    // Neighbor across a face; -1 when the face lies on the outer boundary.
    int neighbor(int cell, int axis, int dir) const;
    std::array<double, 3> cell_center(int cell) const;

    friend MicroGrid tile_micro_domain(const UnitCellGeometry& cell, int tiles);

private:
    int dim_ = 0, tiles_ = 0, n_ = 0, side_ = 0, total_ = 0;
    double eps_ = 0.0, spacing_ = 0.0, cell_volume_ = 0.0, face_area_ = 0.0;
    std::vector<std::uint8_t> phase_;
};

MicroGrid tile_micro_domain(const UnitCellGeometry& cell, int tiles);

// Per-tile averages of the field restricted to one phase, each divided by the
// full eps-cell volume; returns a K^d grid. A unit field on phase m yields the
// phase-m volume fraction in every tile.
std::vector<double> cell_average(const MicroGrid& grid, std::span<const double> field,
                                 std::uint8_t phase);

// Conservative block average of a K^d grid down to an M^d grid; requires M | K.
std::vector<double> block_restrict(std::span<const double> coarse, int dim, int k, int m);

}  // namespace bioheat
