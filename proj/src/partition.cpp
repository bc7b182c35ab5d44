#include "mixturecraft/partition.hpp"
#include "mixturecraft/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mixturecraft {

namespace {

/* Squared distance from the origin to the closed box. */
double box_dist2(const double* lo, const double* hi, int dim)
{
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double c = std::clamp(0.0, lo[a], hi[a]);
        d2 += c * c;
    }
    return d2;
}

/* Pulls an outside cell center onto the ball along the segment toward the
 * box point nearest the origin; that point is inside both the box and the
 * ball whenever the box meets the ball. */
void project_rep(Cell& cell, int dim, double R)
{
    double c2 = 0.0;
    for (int a = 0; a < dim; ++a) c2 += cell.rep[a] * cell.rep[a];
    if (c2 <= R * R) return;

    double q[2] = {0.0, 0.0};
    for (int a = 0; a < dim; ++a) q[a] = std::clamp(0.0, cell.lo[a], cell.hi[a]);

    double aq = 0.0, bq = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double d = q[a] - cell.rep[a];
        aq += d * d;
        bq += 2.0 * cell.rep[a] * d;
    }
    const double cq = c2 - R * R;
    // First root of ||rep + t (q - rep)||^2 = R^2 in (0, 1].
    double t;
    if (aq == 0.0) {
        t = 0.0;
    } else {
        const double disc = std::max(0.0, bq * bq - 4.0 * aq * cq);
        t = (-bq - std::sqrt(disc)) / (2.0 * aq);
        t = std::clamp(t, 0.0, 1.0);
    }
    double n2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        cell.rep[a] += t * (q[a] - cell.rep[a]);
        n2 += cell.rep[a] * cell.rep[a];
    }
    if (n2 > R * R) {
        // Guard against a rounding overshoot; scaling inward stays in the box
        // only up to fp noise, which is all this corrects.
        const double scale = R / std::sqrt(n2);
        for (int a = 0; a < dim; ++a) cell.rep[a] *= scale;
    }
    for (int a = 0; a < dim; ++a) cell.rep[a] = std::clamp(cell.rep[a], cell.lo[a], cell.hi[a]);
}

} // namespace

CellPartition build_partition(double r, double k, double delta, int dim,
                              std::optional<std::span<const double>> anchor)
{
    if (dim != 1 && dim != 2)
        fail(errc::invalid_parameter, "partition dim must be 1 or 2");
    if (!(r > 0.0) || !(k > 0.0))
        fail(errc::invalid_parameter, "partition needs r > 0 and k > 0");
    if (!(delta > 0.0))
        fail(errc::invalid_parameter, "partition needs delta > 0");
    if (anchor && static_cast<int>(anchor->size()) != dim)
        fail(errc::invalid_parameter, "partition anchor dim mismatch");

    CellPartition part;
    part.dim = dim;
    part.radius = r * k;
    part.delta = delta;
    part.side = delta / std::sqrt(static_cast<double>(dim));
    const double R = part.radius;

    double anchor_z[2];
    long i0[2], i1[2];
    for (int a = 0; a < dim; ++a) {
        anchor_z[a] = anchor ? (*anchor)[a] * k : -R;
        i0[a] = static_cast<long>(std::floor((-R - anchor_z[a]) / part.side));
        i1[a] = static_cast<long>(std::ceil((R - anchor_z[a]) / part.side));
        if (anchor_z[a] + static_cast<double>(i0[a] + 1) * part.side <= -R) ++i0[a]; // fp floor slack
        while (anchor_z[a] + static_cast<double>(i1[a] - 1) * part.side >= R) --i1[a];
        if (i1[a] <= i0[a]) i1[a] = i0[a] + 1;
    }

    const long nx = i1[0] - i0[0];
    const long ny = (dim == 2) ? i1[1] - i0[1] : 1;
    if (nx <= 0 || ny <= 0 || nx * ny > (1L << 26))
        fail(errc::invalid_parameter, "partition cell count out of range");

    for (long i = 0; i < nx; ++i) {
        for (long j = 0; j < ny; ++j) {
            Cell cell;
            cell.lo[0] = anchor_z[0] + static_cast<double>(i0[0] + i) * part.side;
            cell.hi[0] = anchor_z[0] + static_cast<double>(i0[0] + i + 1) * part.side;
            if (dim == 2) {
                cell.lo[1] = anchor_z[1] + static_cast<double>(i0[1] + j) * part.side;
                cell.hi[1] = anchor_z[1] + static_cast<double>(i0[1] + j + 1) * part.side;
            }
            if (box_dist2(cell.lo.data(), cell.hi.data(), dim) > R * R) continue;
            for (int a = 0; a < dim; ++a) cell.rep[a] = 0.5 * (cell.lo[a] + cell.hi[a]);
            project_rep(cell, dim, R);
            part.cells.push_back(cell);
        }
    }
    if (part.cells.empty())
        fail(errc::invalid_parameter, "partition kept no cells");
    return part;
}

} // namespace mixturecraft
