#ifndef MIXTURECRAFT_MIXTURE_HPP
#define MIXTURECRAFT_MIXTURE_HPP

#include "mixturecraft/density.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mixturecraft {

struct MixtureComponent {
    double weight = 0.0;
    std::vector<double> location;
    double scale = 1.0;
};

/* Location-scale mixture sum_i w_i * scale_i^-n * kernel((x - mu_i)/scale_i).
 * Build through make_mixture or parse_mixture so the invariants hold. */
struct Mixture {
    DensitySpec kernel;
    int dim = 1;
    std::vector<MixtureComponent> components;
};

/* Validates: components nonempty, finite fields, weights >= 0, scales > 0,
 * locations of kernel dimension, and sum of weights within simplex_tol of 1. */
Mixture make_mixture(const DensitySpec& kernel, std::vector<MixtureComponent> components,
                     double simplex_tol = 1e-9);

double eval_mixture(const Mixture& m, std::span<const double> x);
inline double eval_mixture1(const Mixture& m, double x)
{
    return eval_mixture(m, std::span<const double>(&x, 1));
}

/* Translates every component location by `offset` (exact field-wise add). */
Mixture shift_mixture(const Mixture& m, std::span<const double> offset);

/* JSON with weights/locations/scales as shortest-round-trip decimal strings,
 * so parse(serialize(m)) reproduces them bit for bit. */
std::string serialize_mixture(const Mixture& m);
Mixture parse_mixture(std::string_view text);

/* Shortest decimal form that parses back to exactly the same double. */
std::string format_double(double v);

} // namespace mixturecraft

#endif
