#include "bioheat/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <string>

#include "bioheat/errors.hpp"

namespace bioheat {

namespace {

std::string axis_msg(const char* what, std::size_t box, int axis) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "cell.inclusion[%zu], axis %d: %s", box, axis, what);
    return buf;
}

// Snaps a coordinate to the grid plane index; rejects misaligned values.
int grid_plane(double x, int n, std::size_t box, int axis) {
    const double scaled = x * n;
    const double snapped = std::round(scaled);
    if (std::abs(scaled - snapped) > 1e-9 * n)
        throw ValidationError(axis_msg("box face not aligned with the grid", box, axis));
    return static_cast<int>(snapped);
}

struct Box {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};  // half-open cell index range [lo, hi)
};

}  // namespace

std::array<int, 3> UnitCellGeometry::coords(int cell) const {
    std::array<int, 3> c{0, 0, 0};
    c[0] = cell % n_;
    cell /= n_;
    c[1] = cell % n_;
    if (dim_ == 3) c[2] = cell / n_;
    return c;
}

int UnitCellGeometry::linear_index(const std::array<int, 3>& c) const {
    return c[0] + n_ * (c[1] + n_ * c[2]);
}

int UnitCellGeometry::periodic_neighbor(int cell, int axis, int dir) const {
    std::array<int, 3> c = coords(cell);
    c[axis] = (c[axis] + dir + n_) % n_;
    return linear_index(c);
}

std::array<double, 3> UnitCellGeometry::cell_center(int cell) const {
    const std::array<int, 3> c = coords(cell);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = (c[a] + 0.5) * spacing_;
    return x;
}

UnitCellGeometry build_unit_cell(std::span<const InclusionSpec> inclusions, int n, int dim) {
    if (dim != 2 && dim != 3) throw ValidationError("cell.dim: must be 2 or 3");
    if (n < 1) throw ValidationError("cell.n: must be at least 1");

    std::vector<Box> boxes;
    boxes.reserve(inclusions.size());
    for (std::size_t b = 0; b < inclusions.size(); ++b) {
        const InclusionSpec& inc = inclusions[b];
        if (static_cast<int>(inc.center.size()) != dim)
            throw ValidationError("cell.inclusion.center: needs one entry per dimension");
        if (static_cast<int>(inc.halfwidth.size()) != dim)
            throw ValidationError("cell.inclusion.halfwidth: needs one entry per dimension");
        Box box;
        for (int a = 0; a < dim; ++a) {
            const double w = inc.halfwidth[a];
            if (!(w > 0.0)) throw ValidationError(axis_msg("halfwidth must be positive", b, a));
            const double lo = inc.center[a] - w;
            const double hi = inc.center[a] + w;
            if (!(lo > 0.0 && hi < 1.0))
                throw ValidationError(axis_msg("box must lie strictly inside the cell", b, a));
            box.lo[a] = grid_plane(lo, n, b, a);
            box.hi[a] = grid_plane(hi, n, b, a);
            if (box.hi[a] <= box.lo[a])
                throw ValidationError(axis_msg("box is empty at this resolution", b, a));
        }
        boxes.push_back(box);
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            bool overlap = true;
            for (int a = 0; a < dim; ++a)
                overlap = overlap && boxes[i].lo[a] < boxes[j].hi[a] &&
                          boxes[j].lo[a] < boxes[i].hi[a];
            if (overlap) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "cell.inclusion[%zu] overlaps cell.inclusion[%zu]",
                              i, j);
                throw ValidationError(buf);
            }
        }
    }

    UnitCellGeometry cell;
    cell.dim_ = dim;
    cell.n_ = n;
    cell.total_ = dim == 2 ? n * n : n * n * n;
    cell.spacing_ = 1.0 / n;
    cell.cell_volume_ = 1.0 / static_cast<double>(cell.total_);
    cell.face_area_ = dim == 2 ? cell.spacing_ : cell.spacing_ * cell.spacing_;
    cell.phase_.assign(static_cast<std::size_t>(cell.total_), kTissuePhase);

    for (const Box& box : boxes) {
        const int z_lo = dim == 3 ? box.lo[2] : 0;
        const int z_hi = dim == 3 ? box.hi[2] : 1;
        for (int z = z_lo; z < z_hi; ++z)
            for (int y = box.lo[1]; y < box.hi[1]; ++y)
                for (int x = box.lo[0]; x < box.hi[0]; ++x)
                    cell.phase_[static_cast<std::size_t>(cell.linear_index({x, y, z}))] =
                        kBloodPhase;
    }

    long blood_count = 0;
    for (std::uint8_t p : cell.phase_)
        if (p == kBloodPhase) ++blood_count;
    cell.vol_blood_ = static_cast<double>(blood_count) / static_cast<double>(cell.total_);
    cell.vol_tissue_ = 1.0 - cell.vol_blood_;

    // Each face is visited once from its -side cell along every axis.
    for (int c = 0; c < cell.total_; ++c) {
        for (int a = 0; a < dim; ++a) {
            const int nb = cell.periodic_neighbor(c, a, +1);
            const std::uint8_t pc = cell.phase_[static_cast<std::size_t>(c)];
            const std::uint8_t pn = cell.phase_[static_cast<std::size_t>(nb)];
            if (pc == pn) continue;
            InterfaceFace face;
            face.axis = a;
            if (pc == kTissuePhase) {
                face.tissue_cell = c;
                face.blood_cell = nb;
                face.sign = +1;
            } else {
                face.tissue_cell = nb;
                face.blood_cell = c;
                face.sign = -1;
            }
            cell.interface_faces_.push_back(face);
        }
    }
    cell.interface_area_ =
        static_cast<double>(cell.interface_faces_.size()) * cell.face_area_;

    if (blood_count == cell.total_)
        throw ValidationError("cell.inclusion: no tissue phase left in the cell");

    // Flood fill over tissue cells with periodic wrap.
    std::vector<char> seen(static_cast<std::size_t>(cell.total_), 0);
    int start = -1;
    for (int c = 0; c < cell.total_; ++c)
        if (cell.phase_[static_cast<std::size_t>(c)] == kTissuePhase) {
            start = c;
            break;
        }
    long reached = 0;
    std::queue<int> frontier;
    frontier.push(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!frontier.empty()) {
        const int c = frontier.front();
        frontier.pop();
        ++reached;
        for (int a = 0; a < dim; ++a) {
            for (int dir : {-1, +1}) {
                const int nb = cell.periodic_neighbor(c, a, dir);
                if (cell.phase_[static_cast<std::size_t>(nb)] != kTissuePhase) continue;
                if (seen[static_cast<std::size_t>(nb)]) continue;
                seen[static_cast<std::size_t>(nb)] = 1;
                frontier.push(nb);
            }
        }
    }
    if (reached != cell.total_ - blood_count)
        throw ValidationError(
            "cell.inclusion: tissue phase is disconnected under periodic identification");

    return cell;
}

std::array<int, 3> MicroGrid::coords(int cell) const {
    std::array<int, 3> c{0, 0, 0};
    c[0] = cell % side_;
    cell /= side_;
    c[1] = cell % side_;
    if (dim_ == 3) c[2] = cell / side_;
    return c;
}

int MicroGrid::linear_index(const std::array<int, 3>& c) const {
    return c[0] + side_ * (c[1] + side_ * c[2]);
}

int MicroGrid::neighbor(int cell, int axis, int dir) const {
    std::array<int, 3> c = coords(cell);
    c[axis] += dir;
    if (c[axis] < 0 || c[axis] >= side_) return -1;
    return linear_index(c);
}

std::array<double, 3> MicroGrid::cell_center(int cell) const {
    const std::array<int, 3> c = coords(cell);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = (c[a] + 0.5) * spacing_;
    return x;
}

MicroGrid tile_micro_domain(const UnitCellGeometry& cell, int tiles) {
    if (tiles < 1) throw ValidationError("epsilon: 1/eps must be a positive integer");

    MicroGrid grid;
    grid.dim_ = cell.dim();
    grid.tiles_ = tiles;
    grid.n_ = cell.resolution();
    grid.side_ = tiles * cell.resolution();
    grid.total_ = grid.dim_ == 2 ? grid.side_ * grid.side_
                                 : grid.side_ * grid.side_ * grid.side_;
    grid.eps_ = 1.0 / tiles;
    grid.spacing_ = 1.0 / grid.side_;
    grid.cell_volume_ = 1.0 / static_cast<double>(grid.total_);
    grid.face_area_ = grid.dim_ == 2 ? grid.spacing_ : grid.spacing_ * grid.spacing_;

    grid.phase_.resize(static_cast<std::size_t>(grid.total_));
    for (int c = 0; c < grid.total_; ++c) {
        const std::array<int, 3> mc = grid.coords(c);
        const std::array<int, 3> yc{mc[0] % grid.n_, mc[1] % grid.n_,
                                    grid.dim_ == 3 ? mc[2] % grid.n_ : 0};
        grid.phase_[static_cast<std::size_t>(c)] = cell.phase(cell.linear_index(yc));
    }

    // Inclusions are strictly interior to the cell, so no blood cell may touch
    // the outer boundary.
    for (int c = 0; c < grid.total_; ++c) {
        if (grid.phase_[static_cast<std::size_t>(c)] != kBloodPhase) continue;
        const std::array<int, 3> mc = grid.coords(c);
        for (int a = 0; a < grid.dim_; ++a) {
            if (mc[a] == 0 || mc[a] == grid.side_ - 1)
                throw ValidationError("tiling: blood phase touches the outer boundary");
        }
    }
    return grid;
}

std::vector<double> cell_average(const MicroGrid& grid, std::span<const double> field,
                                 std::uint8_t phase) {
    if (static_cast<int>(field.size()) != grid.cell_count())
        throw ValidationError("cell_average: field size mismatch");
    const int k = grid.tiles_per_side();
    const int n = grid.cell_resolution();
    const int dim = grid.dim();
    const int coarse_total = dim == 2 ? k * k : k * k * k;
    std::vector<double> coarse(static_cast<std::size_t>(coarse_total), 0.0);
    const double per_cell = 1.0 / std::pow(static_cast<double>(n), dim);
    for (int c = 0; c < grid.cell_count(); ++c) {
        if (grid.phase(c) != phase) continue;
        const std::array<int, 3> mc = grid.coords(c);
        const int tile = (mc[0] / n) + k * ((mc[1] / n) + k * (dim == 3 ? mc[2] / n : 0));
        coarse[static_cast<std::size_t>(tile)] += field[static_cast<std::size_t>(c)] * per_cell;
    }
    return coarse;
}

std::vector<double> block_restrict(std::span<const double> coarse, int dim, int k, int m) {
    if (m < 1 || k < 1 || k % m != 0)
        throw ValidationError("macro.M: must divide the number of tiles per side");
    const int expect = dim == 2 ? k * k : k * k * k;
    if (static_cast<int>(coarse.size()) != expect)
        throw ValidationError("block_restrict: field size mismatch");
    const int f = k / m;
    const int out_total = dim == 2 ? m * m : m * m * m;
    std::vector<double> out(static_cast<std::size_t>(out_total), 0.0);
    const double w = 1.0 / std::pow(static_cast<double>(f), dim);
    for (int c = 0; c < expect; ++c) {
        int rest = c;
        const int x = rest % k;
        rest /= k;
        const int y = rest % k;
        const int z = dim == 3 ? rest / k : 0;
        const int tile = (x / f) + m * ((y / f) + m * (z / f));
        out[static_cast<std::size_t>(tile)] += coarse[static_cast<std::size_t>(c)] * w;
    }
    return out;
}

}  // namespace bioheat
