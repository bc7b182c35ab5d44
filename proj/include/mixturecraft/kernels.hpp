#ifndef MIXTURECRAFT_KERNELS_HPP
#define MIXTURECRAFT_KERNELS_HPP

#include "mixturecraft/density.hpp"
#include "mixturecraft/field.hpp"
#include "mixturecraft/partition.hpp"
#include "mixturecraft/quadrature.hpp"

#include <span>
#include <vector>

/* Data-parallel inner loops (OpenMP) next to their serial reference twins.
 * Every pair writes independent slots, so both versions produce identical
 * bits regardless of thread count; the tests and the benchmark target hold
 * them against each other. */

namespace mixturecraft {

/* Field values over the lattice of `grid`, flat row-major order. */
std::vector<double> map_on_grid(const ScalarField& f, const GridSpec& grid);
std::vector<double> map_on_grid_serial(const ScalarField& f, const GridSpec& grid);

/* Field values at explicit points packed [x0, x1, ...] / [x0,y0, x1,y1, ...]. */
std::vector<double> map_on_points(const ScalarField& f, std::span<const double> pts, int dim);
std::vector<double> map_on_points_serial(const ScalarField& f, std::span<const double> pts, int dim);

/* Per-cell masses of h under the scaled partition: out[i] integrates h over
 * cell_i / k with the given tensor Gauss-Legendre rule. */
std::vector<double> cell_masses(const ScalarField& h, const CellPartition& part, double k,
                                const GLRule& rule);
std::vector<double> cell_masses_serial(const ScalarField& h, const CellPartition& part, double k,
                                       const GLRule& rule);

} // namespace mixturecraft

#endif
