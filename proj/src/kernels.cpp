#include "mixturecraft/kernels.hpp"
#include "mixturecraft/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mixturecraft {

namespace {

inline double grid_value(const ScalarField& f, const GridSpec& grid, long idx)
{
    double pt[2];
    grid_point(grid, idx, std::span<double>(pt, f.dim));
    return f.eval(std::span<const double>(pt, f.dim));
}

inline double cell_mass_one(const ScalarField& h, const Cell& cell, int dim, double k,
                            const GLRule& rule)
{
    // Weight integral in target coordinates: cell/k has the Jacobian baked in.
    // The cell splits at interior breakpoints of h so a kink never sits inside
    // one panel of the fixed rule; at most 16 interior cuts per axis are used.
    double lo[2], hi[2];
    for (int a = 0; a < dim; ++a) {
        lo[a] = cell.lo[a] / k;
        hi[a] = cell.hi[a] / k;
    }

    double edges[2][18];
    int nseg[2] = {1, 1};
    for (int a = 0; a < dim; ++a) {
        edges[a][0] = lo[a];
        int n = 1;
        if (a < static_cast<int>(h.breakpoints.size())) {
            const std::vector<double>& bps = h.breakpoints[static_cast<std::size_t>(a)];
            auto it = std::upper_bound(bps.begin(), bps.end(), lo[a]);
            for (; it != bps.end() && *it < hi[a] && n < 17; ++it)
                if (*it > edges[a][n - 1]) edges[a][n++] = *it;
        }
        edges[a][n++] = hi[a];
        nseg[a] = n - 1;
    }

    double total = 0.0;
    if (dim == 1) {
        for (int i = 0; i < nseg[0]; ++i) {
            const double l[1] = {edges[0][i]};
            const double u[1] = {edges[0][i + 1]};
            total += gl_box(h.eval, std::span<const double>(l, 1), std::span<const double>(u, 1),
                            rule);
        }
    } else {
        for (int i = 0; i < nseg[0]; ++i)
            for (int j = 0; j < nseg[1]; ++j) {
                const double l[2] = {edges[0][i], edges[1][j]};
                const double u[2] = {edges[0][i + 1], edges[1][j + 1]};
                total += gl_box(h.eval, std::span<const double>(l, 2),
                                std::span<const double>(u, 2), rule);
            }
    }
    return total;
}

} // namespace

std::vector<double> map_on_grid(const ScalarField& f, const GridSpec& grid)
{
    const int dim = grid_dim(grid);
    if (dim != f.dim) fail(errc::dimension_error, "grid dim mismatches field dim");
    const long total = grid_total_points(grid);
    std::vector<double> out(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) out[static_cast<std::size_t>(i)] = grid_value(f, grid, i);
    return out;
}

std::vector<double> map_on_grid_serial(const ScalarField& f, const GridSpec& grid)
{
    const int dim = grid_dim(grid);
    if (dim != f.dim) fail(errc::dimension_error, "grid dim mismatches field dim");
    const long total = grid_total_points(grid);
    std::vector<double> out(static_cast<std::size_t>(total));
    for (long i = 0; i < total; ++i) out[static_cast<std::size_t>(i)] = grid_value(f, grid, i);
    return out;
}

std::vector<double> map_on_points(const ScalarField& f, std::span<const double> pts, int dim)
{
    if (dim != f.dim) fail(errc::dimension_error, "point dim mismatches field dim");
    const long total = static_cast<long>(pts.size()) / dim;
    std::vector<double> out(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i)
        out[static_cast<std::size_t>(i)] = f.eval(pts.subspan(static_cast<std::size_t>(i) * dim, dim));
    return out;
}

std::vector<double> map_on_points_serial(const ScalarField& f, std::span<const double> pts, int dim)
{
    if (dim != f.dim) fail(errc::dimension_error, "point dim mismatches field dim");
    const long total = static_cast<long>(pts.size()) / dim;
    std::vector<double> out(static_cast<std::size_t>(total));
    for (long i = 0; i < total; ++i)
        out[static_cast<std::size_t>(i)] = f.eval(pts.subspan(static_cast<std::size_t>(i) * dim, dim));
    return out;
}

std::vector<double> cell_masses(const ScalarField& h, const CellPartition& part, double k,
                                const GLRule& rule)
{
    const long n = static_cast<long>(part.cells.size());
    std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            cell_mass_one(h, part.cells[static_cast<std::size_t>(i)], part.dim, k, rule);
    return out;
}

std::vector<double> cell_masses_serial(const ScalarField& h, const CellPartition& part, double k,
                                       const GLRule& rule)
{
    const long n = static_cast<long>(part.cells.size());
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            cell_mass_one(h, part.cells[static_cast<std::size_t>(i)], part.dim, k, rule);
    return out;
}

} // namespace mixturecraft
