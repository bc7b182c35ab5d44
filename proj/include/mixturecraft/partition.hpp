#ifndef MIXTURECRAFT_PARTITION_HPP
#define MIXTURECRAFT_PARTITION_HPP

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace mixturecraft {

/* Half-open axis-aligned box in the scaled coordinate (the topmost cell per
 * axis also owns its upper face, so the kept cells cover the closed ball).
 * rep is the cell center, pulled into the ball when the center lands outside. */
struct Cell {
    std::array<double, 2> lo{};
    std::array<double, 2> hi{};
    std::array<double, 2> rep{};
};

struct CellPartition {
    int dim = 1;
    double radius = 0.0; // covers the closed origin ball of this radius (= r*k)
    double side = 0.0;   // per-axis cell side = delta / sqrt(dim)
    double delta = 0.0;  // cell diameter bound
    std::vector<Cell> cells; // axis-lexicographic order
};

/* Tiles the closed ball of radius r*k with boxes of side delta/sqrt(dim),
 * anchored at -r*k per axis (or at k*anchor when an anchor is given), keeping
 * the boxes that intersect the ball. */
CellPartition build_partition(double r, double k, double delta, int dim,
                              std::optional<std::span<const double>> anchor = std::nullopt);

} // namespace mixturecraft

#endif
