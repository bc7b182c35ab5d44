#ifndef MIXTURECRAFT_FIELD_HPP
#define MIXTURECRAFT_FIELD_HPP

#include "mixturecraft/density.hpp"
#include "mixturecraft/mixture.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mixturecraft {

/* A scalar function on R^n plus the hints the integrators and norm
 * estimators use. */
struct ScalarField {
    int dim = 1;
    std::function<double(std::span<const double>)> eval;

    /* eval returns exactly 0.0 outside the closed origin ball of this radius. */
    double domain_radius = std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> breakpoints; // per-axis quadrature split points
    std::optional<double> lipschitz;

    double operator()(std::span<const double> x) const { return eval(x); }
    double at1(double x) const { return eval(std::span<const double>(&x, 1)); }
};

ScalarField field_of(const DensitySpec& d);
/* Holds a shared copy of the mixture; cheap to pass around. */
ScalarField field_of(const Mixture& m);
ScalarField zero_field(int dim);

/* Norm selector shared by bandwidth selection and the sweep drivers. */
struct NormSpec {
    enum class Kind { sup_on_ball, lp };
    Kind kind = Kind::sup_on_ball;
    double radius = 0.0; // sup_on_ball: measure on the closed origin ball of this radius
    double p = 2.0;      // lp only

    static NormSpec sup_on_ball(double radius)
    {
        NormSpec n;
        n.kind = Kind::sup_on_ball;
        n.radius = radius;
        return n;
    }
    static NormSpec lp(double p)
    {
        NormSpec n;
        n.kind = Kind::lp;
        n.p = p;
        return n;
    }
};

} // namespace mixturecraft

#endif
