#ifndef MIXTURECRAFT_TRUNCATE_HPP
#define MIXTURECRAFT_TRUNCATE_HPP

#include "mixturecraft/density.hpp"
#include "mixturecraft/field.hpp"

#include <vector>

namespace mixturecraft {

/* Compact axis-aligned box. */
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

int box_dim(const Box& K);
/* Radius of the smallest origin-centered closed ball containing K. */
double box_enclosing_radius(const Box& K);

struct TruncationResult {
    ScalarField h;         // u * f
    double r = 0.0;        // enclosing radius of K plus the margin
    double mass = 0.0;     // integral of h
    Box bump_inner;        // K: u == 1 here
    double bump_width = 0.0;   // tau: u ramps to 0 over this shell
    double support_radius = 0.0; // h == 0 outside the origin ball of this radius (<= r)
};

/* h = u*f with u == 1 on K, u == 0 at distance >= tau from K, and the cubic
 * ramp 1 - (3t^2 - 2t^3) of t = dist(x,K)/tau in between.  Requires
 * 0 < tau < margin so supp h stays strictly inside the enlarged ball.
 * require_continuity rejects non-continuous targets (the uniform-norm
 * pipeline needs it; the L_p pipeline passes false). */
TruncationResult truncate(const DensitySpec& f, const Box& K, double margin, double tau,
                          bool require_continuity = true, double mass_tol = 1e-8);

} // namespace mixturecraft

#endif
